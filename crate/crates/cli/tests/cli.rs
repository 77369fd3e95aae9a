//! End-to-end checks of the command-line binary: known scattering output,
//! bit-identical reruns, and exit codes.

use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_scatter1d"))
}

fn write_spec(name: &str, body: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("scatter1d-cli-test-{name}.json"));
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn whole_line_scatter_on_zero_potential_is_trivial() {
    let spec = write_spec("zero", r#"{"kind":"zero","params":{}}"#);
    let out = bin()
        .args(["scatter", "--spec"])
        .arg(&spec)
        .args(["--lambda", "2.0", "--geometry", "whole"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("lambda,re_t1"));
    assert!(header.ends_with("config_hash,tol"));
    let fields: Vec<f64> = lines
        .next()
        .unwrap()
        .split(',')
        .take(9)
        .map(|v| v.parse().unwrap())
        .collect();
    assert!((fields[1] - 1.0).abs() < 1e-8, "t1 = {}", fields[1]); // re t1
    for &r in &[fields[3], fields[4], fields[7], fields[8]] {
        assert!(r.abs() < 1e-8, "reflection should vanish: {r}");
    }
}

#[test]
fn reruns_are_bit_identical() {
    let spec = write_spec(
        "barrier",
        r#"{"kind":"square_barrier","params":{"height":1.0,"a":0.0,"b":1.0}}"#,
    );
    let run = || {
        let out = bin()
            .args(["mfun", "--spec"])
            .arg(&spec)
            .args(["--energies", "1.0,2.0", "--eps", "0.01"])
            .output()
            .unwrap();
        assert!(out.status.success());
        out.stdout
    };
    assert_eq!(run(), run());
}

#[test]
fn validation_failures_exit_2() {
    let spec = write_spec("zero2", r#"{"kind":"zero","params":{}}"#);
    // malformed schedule
    let out = bin()
        .args(["waveop", "--spec"])
        .arg(&spec)
        .args(["--schedule", "linear:1:5"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    // missing spec file
    let out = bin()
        .args(["eigen", "--spec", "/nonexistent/v.json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn multilinear_check_emits_calibrated_json_report() {
    let out = bin()
        .args([
            "multilinear-check",
            "--n",
            "3",
            "--corpus",
            "seed:7",
            "--count",
            "10",
            "--format",
            "json",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["unstable"], serde_json::Value::Bool(false));
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 11); // 10 samples + summary
    for row in &rows[..10] {
        assert_eq!(row["holds"], 1.0);
    }
}
