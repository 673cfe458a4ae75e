//! Binary-level checks: exit codes, config handling, and output determinism.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_fdqpt");

fn run(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .output()
        .expect("failed to spawn fdqpt")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("config.json");
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
    assert_eq!(run(&["echo", "--help"]).status.code(), Some(0));
}

#[test]
fn unknown_flag_is_usage_error() {
    let out = run(&["echo", "--frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
}

#[test]
fn unknown_subcommand_is_usage_error() {
    assert_eq!(run(&["spectrum"]).status.code(), Some(1));
}

#[test]
fn missing_config_is_io_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out_dir = tmp.path().join("out");
    let out = run(&[
        "echo",
        "--config",
        "/nonexistent/fdqpt.json",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn malformed_config_is_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "{\"nk\": \"lots\"");
    let out_dir = tmp.path().join("out");
    let out = run(&["echo", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unknown_config_key_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "{\"coupling\": 1.0}");
    let out_dir = tmp.path().join("out");
    let out = run(&["echo", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn invalid_physics_is_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "{\"params\": {\"j\": 1.0, \"gamma\": 1.0, \"lambda\": 0.6, \
          \"phi1\": 0.0, \"phi2\": 0.785, \"t1\": -1.0, \"t2\": 3.14, \"sites\": 100}}",
    );
    let out_dir = tmp.path().join("out");
    let out = run(&["echo", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn validate_small_run_succeeds() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "{\"draws\": 40, \"seed\": 7}");
    let out_dir = tmp.path().join("out");
    let out = run(&[
        "validate",
        "--config",
        &cfg,
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report = fs::read_to_string(out_dir.join("validate.json")).unwrap();
    let json: serde_json::Value = serde_json::from_str(&report).unwrap();
    assert_eq!(json["seed"], 7);
    assert_eq!(json["failures"].as_array().unwrap().len(), 0);
}

#[test]
fn echo_outputs_are_deterministic_and_versioned() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "{\"nk\": 64, \"nt\": 64}");
    let dirs = [tmp.path().join("a"), tmp.path().join("b")];
    for dir in &dirs {
        let out = run(&["echo", "--config", &cfg, "--out", dir.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
    }
    let csv_a = fs::read(dirs[0].join("echo.csv")).unwrap();
    let csv_b = fs::read(dirs[1].join("echo.csv")).unwrap();
    assert_eq!(csv_a, csv_b);
    let side_a = fs::read(dirs[0].join("echo.json")).unwrap();
    let side_b = fs::read(dirs[1].join("echo.json")).unwrap();
    assert_eq!(side_a, side_b);
    let header = String::from_utf8_lossy(&csv_a);
    assert!(header.starts_with("# fdqpt-echo-v1"));
    assert!(header.lines().next().unwrap().contains("columns=k,t,echo"));
}

#[test]
fn critical_outputs_roots_for_baseline() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "{\"nk\": 512}");
    let out_dir = tmp.path().join("out");
    let out = run(&[
        "critical",
        "--config",
        &cfg,
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let side = fs::read_to_string(out_dir.join("critical.json")).unwrap();
    let json: serde_json::Value = serde_json::from_str(&side).unwrap();
    let roots = json["roots"].as_array().unwrap();
    // baseline drive: crossings near k = 0.2336 pi and 0.8759 pi
    let ks: Vec<f64> = roots
        .iter()
        .map(|r| r["k_over_pi"].as_f64().unwrap())
        .collect();
    assert!(ks.iter().any(|k| (k - 0.2336).abs() < 1e-3));
    assert!(ks.iter().any(|k| (k - 0.8759).abs() < 1e-3));
}

#[test]
fn nk_flag_overrides_config() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "{\"nk\": 64, \"nt\": 32}");
    let out_dir = tmp.path().join("out");
    let out = run(&[
        "echo",
        "--config",
        &cfg,
        "--nk",
        "32",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let side = fs::read_to_string(out_dir.join("echo.json")).unwrap();
    let json: serde_json::Value = serde_json::from_str(&side).unwrap();
    assert_eq!(json["nk"], 32);
}
