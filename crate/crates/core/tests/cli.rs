use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ee-response"))
}

fn write_config(dir: &Path, name: &str, body: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

fn run(config: &Path, out: &Path) -> Output {
    bin().arg("run").arg(config).arg("--out").arg(out).arg("--threads").arg("2").output().unwrap()
}

const SMALL_RING: &str = "scenario = \"xx-reproduce\"\nL = 6\nJ = 2.0\nalpha = 0.1\nt0 = -4.0\nt_max = 8.0\n";

#[test]
fn validate_fills_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.toml", SMALL_RING);
    let out = bin().arg("validate").arg(&cfg).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("lambda = 0.0"), "{text}");
    assert!(text.contains("boundary = \"periodic\""), "{text}");
    assert!(text.contains("# units:"), "{text}");
}

#[test]
fn config_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.toml", "scenario = \"xx-reproduce\"\nL = 20\nalpha = 0.1\n");
    let out = bin().arg("validate").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("`J`"));

    let cfg = write_config(dir.path(), "u.toml", "scenario = \"theorem1\"\nsurprise = 1\n");
    assert_eq!(run(&cfg, &dir.path().join("o")).status.code(), Some(1));
    assert_eq!(bin().arg("validate").arg(dir.path().join("missing.toml")).output().unwrap().status.code(), Some(1));
    assert_eq!(bin().arg("frobnicate").output().unwrap().status.code(), Some(1));
}

#[test]
fn step_contract_violation_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.toml", &format!("{SMALL_RING}dt = 1.0\n"));
    let out = run(&cfg, &dir.path().join("o"));
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn reproduce_writes_artifacts_with_hash() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.toml", SMALL_RING);
    let out_dir = dir.path().join("o");
    let out = run(&cfg, &out_dir);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(out_dir.join("summary.json")).unwrap()).unwrap();
    let hash = summary["config_hash"].as_str().unwrap().to_string();
    assert_eq!(hash.len(), 64);
    for name in [
        "timeseries.csv",
        "kernel.csv",
        "spectrum.csv",
        "effective_config.toml",
        "timeseries.svg",
        "spectrum.svg",
    ] {
        let text = fs::read_to_string(out_dir.join(name)).unwrap();
        assert!(text.contains(&hash), "{name} lacks the config hash");
    }
    let ts = fs::read_to_string(out_dir.join("timeseries.csv")).unwrap();
    assert!(ts.lines().any(|l| l == "# t,drive,ds_exact,ds_linear,d_expectation"));
    let row = ts.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(row.split(',').count(), 5);
    assert!(summary["kk_residual"].as_f64().unwrap() < 1e-6);
    assert!(summary["drive_peak_omega"].as_f64().unwrap() > 0.0);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.toml",
        "scenario = \"alpha-scan\"\nL = 6\nJ = 2.0\nalphas = [0.04, 0.01, 0.02, 0.08]\nt0 = -4.0\nt_max = 6.0\n",
    );
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert!(run(&cfg, &a).status.success());
    let out = bin().arg("run").arg(&cfg).arg("--out").arg(&b).env("EE_RESPONSE_THREADS", "3").output().unwrap();
    assert!(out.status.success());
    let mut names: Vec<_> = fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(names.iter().any(|n| n == "timeseries_03.csv"));
    assert!(names.iter().any(|n| n == "scan.csv"));
    for n in names {
        assert_eq!(fs::read(a.join(&n)).unwrap(), fs::read(b.join(&n)).unwrap(), "{n:?} differs");
    }
}

#[test]
fn small_scenarios_run() {
    let dir = tempfile::tempdir().unwrap();
    let t1 = write_config(dir.path(), "t.toml", "scenario = \"theorem1\"\nt_max = 4.0\n");
    let o = dir.path().join("t");
    assert!(run(&t1, &o).status.success());
    let s: serde_json::Value = serde_json::from_str(&fs::read_to_string(o.join("summary.json")).unwrap()).unwrap();
    assert_eq!(s["product_zero_linear_response"], true);
    assert_eq!(s["entangled_zero_linear_response"], true);
    assert!((s["entangled_alpha_scaling_exponent"].as_f64().unwrap() - 2.0).abs() < 0.15);

    let c = write_config(dir.path(), "c.toml", "scenario = \"canonical-fdt\"\nJ = 1.0\nlambda = 0.2\nbeta = 1.5\nalpha = 0.1\nseed = 3\n");
    let o = dir.path().join("c");
    assert!(run(&c, &o).status.success());
    let s: serde_json::Value = serde_json::from_str(&fs::read_to_string(o.join("summary.json")).unwrap()).unwrap();
    assert!(s["fdt_random_max_residual"].as_f64().unwrap() < 1e-6);
    assert!(s["kernel_residual"].as_f64().unwrap() < 1e-10);
}
