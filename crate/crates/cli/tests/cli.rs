use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use asz_cli::output::{sha256_hex, Table};

fn asz(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_asz"))
        .args(args)
        .args(["--out", dir.to_str().unwrap()])
        .env_remove("ASZ_CAP")
        .output()
        .unwrap()
}

fn manifest(dir: &Path, cmd: &str) -> serde_json::Value {
    serde_json::from_slice(&fs::read(dir.join(format!("{cmd}.manifest.json"))).unwrap()).unwrap()
}

#[test]
fn avg_trace_check_passes_with_exact_value() {
    let dir = tempfile::tempdir().unwrap();
    let out = asz(dir.path(), &["avg-trace", "--p", "3", "--n", "1", "--d", "4", "--r", "1", "--check"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let (h, rows) = Table::from_csv(&fs::read(dir.path().join("avg-trace.csv")).unwrap()).unwrap();
    let exact = h.iter().position(|c| c == "exact").unwrap();
    assert!(rows.iter().all(|r| r[exact] == "num=[-1,0];den=1;qpow=-1"));
    assert_eq!(manifest(dir.path(), "avg-trace")["check"], true);
}

#[test]
fn validation_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["avg-trace", "--p", "4", "--d", "4", "--r", "1"][..],
        &["avg-trace", "--p", "3", "--d", "3", "--r", "1"],
        &["avg-trace", "--p", "3", "--d", "4"],
        &["avg-trace", "--p", "3", "--d", "4", "--r", "1", "--bogus"],
        &["frobnicate"],
        &["avg-trace", "--p", "3", "--d", "4", "--r", "1", "--cap", "0"],
        &["avg-trace", "--p", "3", "--d", "4", "--r", "9", "--cap", "100"],
        &["two-level", "--p", "3", "--d", "8", "--window", "fejer:0.4,0.4"],
    ] {
        let out = asz(dir.path(), args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn env_cap_is_honoured() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_asz"))
        .args(["avg-trace", "--p", "3", "--d", "4", "--r", "6", "--out", dir.path().to_str().unwrap()])
        .env("ASZ_CAP", "50")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cap"));
}

#[test]
fn help_exits_0() {
    let out = Command::new(env!("CARGO_BIN_EXE_asz")).arg("--help").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    for name in asz_cli::config::COMMAND_NAMES {
        assert!(text.contains(name), "{name}");
    }
}

#[test]
fn manifest_digest_tracks_csv() {
    let dir = tempfile::tempdir().unwrap();
    let base = ["avg-trace", "--p", "3", "--d", "4", "--r", "1..3"];
    asz(dir.path(), &base);
    let m1 = manifest(dir.path(), "avg-trace");
    let csv1 = fs::read(dir.path().join("avg-trace.csv")).unwrap();
    assert_eq!(m1["outputs"][0]["sha256"], sha256_hex(&csv1));
    asz(dir.path(), &base);
    let m2 = manifest(dir.path(), "avg-trace");
    assert_eq!(m1["outputs"][0]["sha256"], m2["outputs"][0]["sha256"]);
    asz(dir.path(), &["avg-trace", "--p", "3", "--d", "4", "--r", "1..4"]);
    let m3 = manifest(dir.path(), "avg-trace");
    let csv3 = fs::read(dir.path().join("avg-trace.csv")).unwrap();
    assert_ne!(csv1, csv3);
    assert_ne!(m1["outputs"][0]["sha256"], m3["outputs"][0]["sha256"]);
    assert_eq!(m3["outputs"][0]["sha256"], sha256_hex(&csv3));
    assert_eq!(m3["params"]["r"], "1..4");
    assert_eq!(m3["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn seeded_monte_carlo_reproduces() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["rmt-baseline", "--size", "5", "--r", "1..4", "--samples", "300", "--seed", "7"];
    asz(a.path(), &[&args[..], &["--jobs", "1"]].concat());
    asz(b.path(), &[&args[..], &["--jobs", "4"]].concat());
    let read = |d: &Path| fs::read(d.join("rmt-baseline.csv")).unwrap();
    assert_eq!(read(a.path()), read(b.path()));
}

#[test]
fn config_file_supplies_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "p=3\nd=5\nr=1..2\ncheck=true\n").unwrap();
    let out = asz(dir.path(), &["avg-trace", "--config", cfg.to_str().unwrap(), "--d", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let m = manifest(dir.path(), "avg-trace");
    assert_eq!(m["params"]["d"], 4);
    assert_eq!(m["params"]["p"], 3);
}
