//! Flat TOML scenario configuration.

use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::models::Boundary;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    XxReproduce,
    AlphaScan,
    Theorem1,
    CanonicalFdt,
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scenario::XxReproduce => "xx-reproduce",
            Scenario::AlphaScan => "alpha-scan",
            Scenario::Theorem1 => "theorem1",
            Scenario::CanonicalFdt => "canonical-fdt",
        })
    }
}

/// Keys as written in the file; everything optional except the scenario.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    scenario: Scenario,
    #[serde(rename = "L")]
    sites: Option<usize>,
    lambda: Option<f64>,
    #[serde(rename = "J")]
    coupling: Option<f64>,
    boundary: Option<Boundary>,
    site: Option<usize>,
    k: Option<usize>,
    alpha: Option<f64>,
    alphas: Option<Vec<f64>>,
    #[serde(rename = "T")]
    period: Option<f64>,
    t0: Option<f64>,
    t_max: Option<f64>,
    dt: Option<f64>,
    out_dir: Option<String>,
    pad: Option<usize>,
    seed: Option<u64>,
    beta: Option<f64>,
    omega_a: Option<f64>,
    omega_b: Option<f64>,
}

/// Normalized configuration with every default filled in.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    #[serde(rename = "L")]
    pub sites: usize,
    pub lambda: f64,
    #[serde(rename = "J")]
    pub coupling: f64,
    pub boundary: Boundary,
    pub site: usize,
    pub k: usize,
    /// Ascending drive amplitudes; a single entry for one-shot scenarios.
    pub alphas: Vec<f64>,
    #[serde(rename = "T")]
    pub period: f64,
    pub t0: f64,
    pub t_max: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    pub out_dir: String,
    pub pad: usize,
    pub seed: u64,
    pub beta: f64,
    pub omega_a: f64,
    pub omega_b: f64,
}

fn missing(key: &str, scenario: Scenario) -> Error {
    Error::Config(format!("missing key `{key}` (required by scenario {scenario})"))
}

fn invalid(key: &str, why: impl fmt::Display) -> Error {
    Error::Config(format!("invalid `{key}`: {why}"))
}

fn finite(key: &str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(invalid(key, "must be finite"))
    }
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        Self::normalize(raw)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    fn normalize(raw: RawConfig) -> Result<Self> {
        let sc = raw.scenario;
        let chain = matches!(sc, Scenario::XxReproduce | Scenario::AlphaScan);
        let sites = match (raw.sites, sc) {
            (Some(l), _) => l,
            (None, Scenario::Theorem1 | Scenario::CanonicalFdt) => 2,
            (None, _) => return Err(missing("L", sc)),
        };
        if sites < 2 {
            return Err(invalid("L", "the chain needs at least 2 sites"));
        }
        let coupling = match (raw.coupling, sc) {
            (Some(j), _) => finite("J", j)?,
            (None, Scenario::Theorem1) => 1.0,
            (None, _) => return Err(missing("J", sc)),
        };
        if coupling == 0.0 {
            return Err(invalid("J", "must be nonzero"));
        }
        let lambda = finite("lambda", raw.lambda.unwrap_or(0.0))?;
        let site = raw.site.unwrap_or(1);
        let k = raw.k.unwrap_or(1);
        if chain {
            if site == 0 || site > sites {
                return Err(invalid("site", format!("must lie in 1..={sites}")));
            }
            if k == 0 || k > sites {
                return Err(invalid("k", format!("must lie in 1..={sites}")));
            }
        }
        let mut alphas = match (raw.alpha, raw.alphas, sc) {
            (Some(_), Some(_), _) => {
                return Err(Error::Config("give either `alpha` or `alphas`, not both".into()))
            }
            (Some(a), None, _) => vec![a],
            (None, Some(v), _) => v,
            (None, None, Scenario::Theorem1) => vec![0.01, 0.02, 0.04, 0.08],
            (None, None, Scenario::CanonicalFdt) => vec![0.1],
            (None, None, Scenario::XxReproduce) => return Err(missing("alpha", sc)),
            (None, None, Scenario::AlphaScan) => return Err(missing("alphas", sc)),
        };
        if alphas.is_empty() {
            return Err(invalid("alphas", "list is empty"));
        }
        for a in &alphas {
            finite("alpha", *a)?;
        }
        alphas.sort_by(f64::total_cmp);
        if alphas.windows(2).any(|w| w[0] == w[1]) {
            return Err(invalid("alphas", "amplitudes must be distinct"));
        }
        match sc {
            Scenario::XxReproduce | Scenario::CanonicalFdt if alphas.len() != 1 => {
                return Err(invalid("alphas", format!("scenario {sc} takes a single `alpha`")));
            }
            Scenario::AlphaScan | Scenario::Theorem1 => {
                if alphas.iter().any(|a| *a <= 0.0) {
                    return Err(invalid("alphas", "amplitudes must be positive for the scaling fit"));
                }
                if sc == Scenario::Theorem1 && alphas.len() < 4 {
                    return Err(invalid("alphas", "the scaling fit needs at least 4 amplitudes"));
                }
            }
            _ => {}
        }
        let period = finite("T", raw.period.unwrap_or(0.5 * PI))?;
        if period <= 0.0 {
            return Err(invalid("T", "must be positive"));
        }
        let t0 = finite("t0", raw.t0.unwrap_or(-8.0))?;
        let default_t_max = if chain { 40.0 } else { 8.0 };
        let t_max = finite("t_max", raw.t_max.unwrap_or(default_t_max))?;
        if t_max <= t0 {
            return Err(invalid("t_max", "must exceed t0"));
        }
        if let Some(dt) = raw.dt {
            if !(dt > 0.0) || !dt.is_finite() {
                return Err(invalid("dt", "must be positive"));
            }
            let ratio = (t_max - t0) / dt;
            if (ratio - ratio.round()).abs() > 1e-9 * ratio.max(1.0) {
                return Err(invalid("dt", "(t_max - t0) / dt must be an integer"));
            }
        }
        let pad = raw.pad.unwrap_or(2);
        if pad < 2 {
            return Err(invalid("pad", "must be at least 2"));
        }
        let beta = finite("beta", raw.beta.unwrap_or(1.0))?;
        if sc == Scenario::CanonicalFdt && beta <= 0.0 {
            return Err(invalid("beta", "must be positive"));
        }
        let omega_a = finite("omega_a", raw.omega_a.unwrap_or(1.0))?;
        let omega_b = finite("omega_b", raw.omega_b.unwrap_or(0.6))?;
        Ok(Self {
            scenario: sc,
            sites,
            lambda,
            coupling,
            boundary: raw.boundary.unwrap_or(Boundary::Periodic),
            site,
            k,
            alphas,
            period,
            t0,
            t_max,
            dt: raw.dt,
            out_dir: raw.out_dir.unwrap_or_else(|| "out".into()),
            pad,
            seed: raw.seed.unwrap_or(0),
            beta,
            omega_a,
            omega_b,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alphas[self.alphas.len() - 1]
    }

    pub fn out_path(&self) -> PathBuf {
        PathBuf::from(&self.out_dir)
    }

    /// Canonical TOML body of the effective configuration.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// SHA-256 of [`ScenarioConfig::to_toml`], hex encoded.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_toml().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Effective configuration with a units header, as written next to outputs.
    pub fn effective_file(&self) -> String {
        format!(
            "# effective configuration\n# config-hash: {}\n# units: hbar = k_B = 1; times in inverse energy units; entropies in nats\n{}",
            self.hash(),
            self.to_toml()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn missing_coupling_names_the_key() {
        let err = ScenarioConfig::from_toml_str("scenario = \"xx-reproduce\"\nL = 20\nalpha = 0.1\n").unwrap_err();
        assert!(err.to_string().contains("`J`"), "{err}");
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn defaults_are_recorded() {
        let cfg = ScenarioConfig::from_toml_str("scenario = \"xx-reproduce\"\nL = 20\nJ = 2.0\nalpha = 0.1\n").unwrap();
        assert_eq!(cfg.lambda, 0.0);
        let body = cfg.to_toml();
        assert!(body.contains("lambda = 0.0"), "{body}");
        assert!(cfg.effective_file().contains("units"));
    }

    #[test]
    fn alpha_list_is_sorted() {
        let cfg = ScenarioConfig::from_toml_str(
            "scenario = \"alpha-scan\"\nL = 20\nJ = 2.0\nalphas = [0.08, 0.01, 0.04, 0.02]\n",
        )
        .unwrap();
        assert_eq!(cfg.alphas, vec![0.01, 0.02, 0.04, 0.08]);
    }

    #[test]
    fn unknown_keys_and_bad_values_are_rejected() {
        let err = ScenarioConfig::from_toml_str("scenario = \"theorem1\"\ncolour = 3\n").unwrap_err();
        assert!(err.to_string().contains("colour"), "{err}");
        assert!(ScenarioConfig::from_toml_str("scenario = \"xx-reproduce\"\nL = 1\nJ = 2.0\nalpha = 0.1\n").is_err());
        assert!(ScenarioConfig::from_toml_str("scenario = \"xx-reproduce\"\nL = 4\nJ = 2.0\nalpha = 0.1\nsite = 5\n").is_err());
        assert!(ScenarioConfig::from_toml_str("scenario = \"xx-reproduce\"\nL = 4\nJ = 2.0\nalpha = 0.1\ndt = 0.7\n").is_err());
        assert!(ScenarioConfig::from_toml_str("scenario = \"canonical-fdt\"\nJ = 1.0\nbeta = 0.0\n").is_err());
        let err = ScenarioConfig::from_toml_str("scenario = \"xx-reproduce\"\nL = \"x\"\n").unwrap_err();
        assert!(err.to_string().contains("line"), "{err}");
    }

    #[test]
    fn hash_is_stable_and_sensitive() {
        let a = ScenarioConfig::from_toml_str("scenario = \"theorem1\"\n").unwrap();
        let b = ScenarioConfig::from_toml_str("scenario = \"theorem1\"\nomega_b = 0.6\n").unwrap();
        let c = ScenarioConfig::from_toml_str("scenario = \"theorem1\"\nomega_b = 0.7\n").unwrap();
        assert_eq!(a.hash(), b.hash());
        assert_ne!(a.hash(), c.hash());
        assert_eq!(a.hash().len(), 64);
    }
}
