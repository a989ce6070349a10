use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spectral-bounds")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> Output {
    let out = run(args);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn json_file(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn generate_report_verify() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("t3.json");
    let report = dir.path().join("report.json");
    let g = graph.to_str().unwrap();
    let r = report.to_str().unwrap();

    ok(&["--out", g, "generate", "--family", "bethe", "--beta", "3", "--depth", "5"]);
    assert_eq!(json_file(&graph)["format"], "mgraph/1");

    ok(&["--out", r, "report", g, "--cap", "6", "--kmax", "1"]);
    let rep = json_file(&report);
    assert_eq!(rep["format"], "bounds-report/1");
    assert!(rep["verdicts"].as_array().unwrap().iter().all(|v| v["pass"] == true));

    let out = ok(&["verify", r]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["reproduced"], true);

    // λ_q and λ_d swapped and inflated: the ordering check must fail
    let mut bad = rep.clone();
    let q = bad["computed"]["quantum"]["lambda0"].as_f64().unwrap();
    let d = bad["computed"]["discrete"]["lambda0"].as_f64().unwrap();
    bad["computed"]["quantum"]["lambda0"] = (10.0 * d).into();
    bad["computed"]["discrete"]["lambda0"] = q.into();
    let corrupted = dir.path().join("bad.json");
    fs::write(&corrupted, serde_json::to_string(&bad).unwrap()).unwrap();
    assert_eq!(run(&["verify", corrupted.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn bounds_spectrum_volume() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("z1.json");
    let g = graph.to_str().unwrap();
    ok(&["--out", g, "generate", "--family", "lattice", "--dim", "1", "--radius", "8"]);

    let out = ok(&["bounds", g, "--cap", "6", "--kmax", "2"]);
    let b: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(b.is_object());
    let csv = ok(&["--format", "csv", "bounds", g, "--cap", "6", "--kmax", "2"]);
    assert!(String::from_utf8(csv.stdout).unwrap().starts_with("kind,k,value"));

    let prefix = dir.path().join("m");
    let out = ok(&["spectrum", g, "--mode", "discrete", "--export-matrices", prefix.to_str().unwrap()]);
    let s: Value = serde_json::from_slice(&out.stdout).unwrap();
    let exact = 1.0 - (std::f64::consts::PI / 16.0).cos();
    assert!((s["lambda0"].as_f64().unwrap() - exact).abs() < 1e-9);
    assert!(dir.path().join("m.stiffness.coo").exists());
    assert!(dir.path().join("m.mass.coo").exists());

    let out = ok(&["volume", g, "--center", "root"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().count() > 2);
}

#[test]
fn random_weighted_cheeger() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("w.json");
    let g = graph.to_str().unwrap();
    ok(&["--seed", "7", "--out", g, "generate", "--family", "random-weighted", "--n", "9"]);
    assert_eq!(json_file(&graph)["format"], "wgraph/1");
    let out = ok(&["bounds", g, "--cap", "9"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["verdicts"].as_array().unwrap().iter().all(|v| v["pass"] == true));

    // same seed, same file
    let again = dir.path().join("w2.json");
    ok(&["--seed", "7", "--out", again.to_str().unwrap(), "generate", "--family", "random-weighted", "--n", "9"]);
    assert_eq!(fs::read(&graph).unwrap(), fs::read(&again).unwrap());
}

#[test]
fn errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.json");
    assert_eq!(run(&["report", missing.to_str().unwrap()]).status.code(), Some(1));

    let graph = dir.path().join("t3.json");
    ok(&["--out", graph.to_str().unwrap(), "generate", "--family", "bethe", "--depth", "3"]);
    let out = run(&["volume", graph.to_str().unwrap(), "--center", "vertex:9999"]);
    assert_eq!(out.status.code(), Some(1));

    let garbage = dir.path().join("garbage.json");
    fs::write(&garbage, "{\"format\": \"mgraph/0\"}").unwrap();
    assert_eq!(run(&["spectrum", garbage.to_str().unwrap()]).status.code(), Some(1));
}
