use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn rost(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rost")).args(args).output().expect("run rost")
}

fn write_config(dir: &Path, name: &str, cfg: &Value) -> String {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string_pretty(cfg).unwrap()).unwrap();
    path.to_str().unwrap().to_string()
}

fn uniform(n: usize) -> Value {
    json!({
        "mu": {"components": [{"kind": "uniform", "a": 0.0, "b": 2.0, "w": 1.0}]},
        "nu": {"components": [{"kind": "atom", "x": 0.0, "w": 1.0}]},
        "T": 1.0,
        "N": n,
        "mc": {"n_paths": 20000, "dt": 5e-4, "seed": 11}
    })
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn stderr_error(out: &Output) -> Value {
    let text = String::from_utf8_lossy(&out.stderr);
    let line = text.lines().last().expect("stderr line");
    serde_json::from_str(line).expect("json error line")
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn solve_uniform_writes_every_node() {
    let dir = TempDir::new().unwrap();
    let cfg = configs().join("uniform.json");
    let out = rost(&["solve", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = csv_rows(&dir.path().join("boundaries.csv"));
    assert_eq!(rows.len(), 201);
    assert!(rows.iter().all(|r| r[2] == "inf"));
    let diag = read_json(&dir.path().join("diagnostics.json"));
    assert_eq!(diag["certified"], json!(true));
    let resolved = read_json(&dir.path().join("config.resolved.json"));
    assert_eq!(resolved["N"], json!(200));
    assert!(resolved["solver"]["residual_tol"].is_number());
    assert!(resolved["mc"]["n_paths"].is_number());
}

#[test]
fn exponential_target_has_no_lower_boundary() {
    let dir = TempDir::new().unwrap();
    let cfg = configs().join("exponential_1.5.json");
    let out = rost(&["solve", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = csv_rows(&dir.path().join("boundaries.csv"));
    assert_eq!(rows.len(), 501);
    assert!(rows.iter().all(|r| r[2] == "inf"));
    assert!(rows.iter().all(|r| r[1].parse::<f64>().unwrap().is_finite()));
}

#[test]
fn invalid_measure_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let mut cfg = uniform(10);
    cfg["mu"]["components"][0]["w"] = json!(0.9);
    let path = write_config(dir.path(), "bad.json", &cfg);
    let out = rost(&["solve", "--config", &path, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_error(&out)["error"], json!("ConfigInvalid"));
}

#[test]
fn unknown_field_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let mut cfg = uniform(10);
    cfg["solver"] = json!({"residual_tolerance": 1e-9});
    let path = write_config(dir.path(), "bad.json", &cfg);
    let out = rost(&["solve", "--config", &path, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_config_is_an_io_error() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("nope.json");
    let out = rost(&["solve", "--config", missing.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_error(&out)["error"], json!("IO"));
}

#[test]
fn verify_uniform_passes_both_gates() {
    let dir = TempDir::new().unwrap();
    let path = write_config(dir.path(), "cfg.json", &uniform(200));
    let out = rost(&["verify", "--config", &path, "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr));
    let report = read_json(&dir.path().join("verify.json"));
    assert_eq!(report["pass"], json!(true));
    assert_eq!(report["oracle"]["pass"], json!(true));
    assert_eq!(report["mc"]["pass"], json!(true));
    assert!(dir.path().join("oracle.csv").exists());
    let samples = std::fs::read_to_string(dir.path().join("mc_samples.csv")).unwrap();
    assert_eq!(samples.lines().count(), 20001);
}

#[test]
fn verify_without_mc_reports_the_oracle_only() {
    let dir = TempDir::new().unwrap();
    let path = write_config(dir.path(), "cfg.json", &uniform(100));
    let out = rost(&["verify", "--config", &path, "--out", dir.path().to_str().unwrap(), "--no-mc"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = read_json(&dir.path().join("verify.json"));
    assert!(report.get("oracle").is_some());
    assert!(report.get("mc").is_none());
    assert!(!dir.path().join("mc_samples.csv").exists());
}

#[test]
fn shuffled_boundaries_fail_the_oracle_gate() {
    let dir = TempDir::new().unwrap();
    let path = write_config(dir.path(), "cfg.json", &uniform(100));
    let out_dir = dir.path().join("solve");
    let out = rost(&["solve", "--config", &path, "--out", out_dir.to_str().unwrap()]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(out_dir.join("boundaries.csv")).unwrap();
    let mut lines: Vec<&str> = text.lines().collect();
    let header = lines.remove(0);
    let t: Vec<&str> = lines.iter().map(|l| l.split(',').next().unwrap()).collect();
    let mut values: Vec<String> = lines.iter().map(|l| l.splitn(2, ',').nth(1).unwrap().to_string()).collect();
    // reverse the boundary values against the time column
    values.reverse();
    let shuffled: Vec<String> = t.iter().zip(&values).map(|(t, v)| format!("{t},{v}")).collect();
    let bad = dir.path().join("shuffled.csv");
    std::fs::write(&bad, format!("{header}\n{}\n", shuffled.join("\n"))).unwrap();
    let out = rost(&[
        "verify",
        "--config",
        &path,
        "--out",
        dir.path().join("verify").to_str().unwrap(),
        "--boundaries",
        bad.to_str().unwrap(),
        "--no-mc",
    ]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
    let report = read_json(&dir.path().join("verify/verify.json"));
    assert_eq!(report["pass"], json!(false));
}

#[test]
fn boundaries_on_another_grid_are_rejected() {
    let dir = TempDir::new().unwrap();
    let coarse = write_config(dir.path(), "coarse.json", &uniform(50));
    let fine = write_config(dir.path(), "fine.json", &uniform(100));
    let out_dir = dir.path().join("solve");
    assert!(rost(&["solve", "--config", &coarse, "--out", out_dir.to_str().unwrap()]).status.success());
    let csv = out_dir.join("boundaries.csv");
    let out = rost(&["verify", "--config", &fine, "--out", out_dir.to_str().unwrap(), "--boundaries", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

fn value_lines(out: &Output) -> Vec<f64> {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| l.split_whitespace().last().unwrap().parse().unwrap())
        .collect()
}

#[test]
fn value_vanishes_at_the_horizon_and_agrees_inside() {
    let dir = TempDir::new().unwrap();
    let path = write_config(dir.path(), "cfg.json", &uniform(100));
    let out_dir = dir.path().to_str().unwrap();
    let v = value_lines(&rost(&["value", "--config", &path, "--out", out_dir, "--t", "1", "--x", "0.3"]));
    assert_eq!(v[0], 0.0);
    assert_eq!(v[1], 0.0);
    let csv = dir.path().join("boundaries.csv");
    let v = value_lines(&rost(&[
        "value",
        "--config",
        &path,
        "--out",
        out_dir,
        "--boundaries",
        csv.to_str().unwrap(),
        "--t",
        "0.25",
        "--x",
        "-0.4",
    ]));
    assert!(v[0] > 0.0);
    assert!((v[0] - v[1]).abs() < 1e-6, "{v:?}");
}

#[test]
fn value_rejects_times_past_the_horizon() {
    let dir = TempDir::new().unwrap();
    let path = write_config(dir.path(), "cfg.json", &uniform(20));
    let out = rost(&["value", "--config", &path, "--out", dir.path().to_str().unwrap(), "--t", "1.5", "--x", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn runs_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let mut cfg = uniform(100);
    cfg["mc"]["n_paths"] = json!(2000);
    let path = write_config(dir.path(), "cfg.json", &cfg);
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = rost(&["verify", "--config", &path, "--out", out.to_str().unwrap(), "--seed", "99"]);
        assert!(o.status.code().is_some_and(|c| c <= 1), "{}", String::from_utf8_lossy(&o.stderr));
        out
    };
    let (a, b) = (run("a"), run("b"));
    for file in ["boundaries.csv", "mc_samples.csv", "oracle.csv", "verify.json"] {
        assert_eq!(std::fs::read(a.join(file)).unwrap(), std::fs::read(b.join(file)).unwrap(), "{file}");
    }
    let resolved = read_json(&a.join("config.resolved.json"));
    assert_eq!(resolved["mc"]["seed"], json!(99));
}

#[test]
fn resolved_config_reproduces_the_run() {
    let dir = TempDir::new().unwrap();
    let path = write_config(dir.path(), "cfg.json", &uniform(80));
    let first = dir.path().join("first");
    assert!(rost(&["solve", "--config", &path, "--out", first.to_str().unwrap()]).status.success());
    let resolved = first.join("config.resolved.json");
    let second = dir.path().join("second");
    assert!(rost(&["solve", "--config", resolved.to_str().unwrap(), "--out", second.to_str().unwrap()]).status.success());
    for file in ["boundaries.csv", "diagnostics.json"] {
        assert_eq!(std::fs::read(first.join(file)).unwrap(), std::fs::read(second.join(file)).unwrap(), "{file}");
    }
}
