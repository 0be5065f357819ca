//! Artifact writers: CSV, flat JSON summary, effective config.
//!
//! All files are written to a temporary sibling and renamed into place, so a
//! reader never sees a half-written artifact.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde_json::{Map, Value};

use crate::error::{Error, Result};

/// Write `contents` to `path` via a temporary file in the same directory.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path
        .file_name()
        .ok_or_else(|| Error::Config(format!("not a file path: {}", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp", name.to_string_lossy()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Column-major numeric table with `#` comment lines.
#[derive(Clone, Debug, Default)]
pub struct CsvTable {
    pub comments: Vec<String>,
    pub columns: Vec<String>,
    pub data: Vec<Vec<f64>>,
}

impl CsvTable {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            comments: Vec::new(),
            columns: columns.iter().map(|s| s.to_string()).collect(),
            data: vec![Vec::new(); columns.len()],
        }
    }

    pub fn comment(mut self, line: impl Into<String>) -> Self {
        self.comments.push(line.into());
        self
    }

    /// Replace column `name` wholesale.
    pub fn set(mut self, name: &str, values: Vec<f64>) -> Self {
        let i = self.index(name);
        self.data[i] = values;
        self
    }

    pub fn push_row(&mut self, row: &[f64]) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        for (col, v) in self.data.iter_mut().zip(row) {
            col.push(*v);
        }
    }

    pub fn column(&self, name: &str) -> &[f64] {
        &self.data[self.index(name)]
    }

    fn index(&self, name: &str) -> usize {
        self.columns
            .iter()
            .position(|c| c == name)
            .unwrap_or_else(|| panic!("no column {name}"))
    }

    pub fn rows(&self) -> usize {
        self.data.first().map_or(0, Vec::len)
    }

    /// Render with the config hash as the first header line.
    pub fn render(&self, hash: &str) -> String {
        let rows = self.rows();
        assert!(self.data.iter().all(|c| c.len() == rows), "ragged table");
        let mut out = String::with_capacity(rows * self.columns.len() * 25 + 256);
        let _ = writeln!(out, "# config-hash: {hash}");
        for line in &self.comments {
            let _ = writeln!(out, "# {line}");
        }
        let _ = writeln!(out, "# {}", self.columns.join(","));
        for r in 0..rows {
            for (j, col) in self.data.iter().enumerate() {
                if j > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{}", fmt_float(col[r]));
            }
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: &Path, hash: &str) -> Result<()> {
        write_atomic(path, self.render(hash).as_bytes())
    }
}

/// 17 significant digits.
pub fn fmt_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

/// Flat JSON object with sorted keys.
#[derive(Clone, Debug, Default)]
pub struct Summary {
    map: Map<String, Value>,
}

impl Summary {
    pub fn new(hash: &str, scenario: &str) -> Self {
        let mut s = Self::default();
        s.put("config_hash", hash);
        s.put("scenario", scenario);
        s
    }

    pub fn put(&mut self, key: &str, v: impl Into<Value>) {
        self.map.insert(key.to_string(), v.into());
    }

    /// Non-finite values become `null`.
    pub fn num(&mut self, key: &str, v: f64) {
        let val = serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number);
        self.map.insert(key.to_string(), val);
    }

    pub fn opt(&mut self, key: &str, v: Option<f64>) {
        match v {
            Some(x) => self.num(key, x),
            None => self.put(key, Value::Null),
        }
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.map.get(key)
    }

    pub fn render(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.map).expect("json");
        s.push('\n');
        s
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.render().as_bytes())
    }
}

/// Output directory with the config hash every artifact carries.
#[derive(Clone, Debug)]
pub struct ArtifactDir {
    pub root: PathBuf,
    pub hash: String,
}

impl ArtifactDir {
    pub fn new(root: impl Into<PathBuf>, hash: impl Into<String>) -> Result<Self> {
        let root = root.into();
        fs::create_dir_all(&root)?;
        Ok(Self {
            root,
            hash: hash.into(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn csv(&self, name: &str, table: &CsvTable) -> Result<PathBuf> {
        let p = self.path(name);
        table.write(&p, &self.hash)?;
        Ok(p)
    }

    pub fn text(&self, name: &str, body: &str) -> Result<PathBuf> {
        let p = self.path(name);
        write_atomic(&p, body.as_bytes())?;
        Ok(p)
    }
}
