use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vqgen")).args(args).output().unwrap()
}

fn ok_json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn builtin_solve_small_grid() {
    let v = ok_json(&["vqge", "solve", "--builtin", "example1", "--grid", "200"]);
    assert_eq!(v["tool"], "vqgen");
    assert_eq!(v["config"]["solver"]["scan"]["grid_points"], 200);
    let r = &v["result"];
    assert_eq!(r["pencil"]["commuting"], true);
    let got: Vec<f64> = r["eigenpairs"].as_array().unwrap().iter().map(|p| p["eigenvalue"].as_f64().unwrap()).collect();
    let want = [0.6685, 0.9265, 1.3643, 1.8171];
    assert_eq!(got.len(), 4);
    for (a, b) in got.iter().zip(want) {
        assert!((a - b).abs() < 5e-3, "{got:?}");
    }
    assert!(r["noise"].is_null());
}

#[test]
fn shots_report_error_bound() {
    let v = ok_json(&["--shots", "1000", "vqge", "solve", "--builtin", "example1", "--grid", "60"]);
    let noise = &v["result"]["noise"];
    let delta = noise["delta"].as_f64().unwrap();
    let bound = noise["error_bound"].as_f64().unwrap();
    let lmin = v["result"]["pencil"]["lambda_min_s"].as_f64().unwrap();
    assert!((bound - delta / lmin).abs() < 1e-12);
}

#[test]
fn scan_writes_csv_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let o = run(&["--out", out.to_str().unwrap(), "vqge", "scan", "--builtin", "example2", "--grid", "40"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(o.stdout.is_empty());
    let csv = fs::read_to_string(out.join("scan.csv")).unwrap();
    assert!(csv.starts_with("tau,min_cost\n"));
    assert_eq!(csv.lines().count(), 41);
    let v: Value = serde_json::from_str(&fs::read_to_string(out.join("scan.json")).unwrap()).unwrap();
    assert_eq!(v["result"]["pencil"]["cost"], "shift-ratio");
    assert_eq!(v["result"]["pencil"]["scan_cost"], "shift-square");
}

#[test]
fn identity_dense_pencil() {
    let dir = tempfile::tempdir().unwrap();
    let eye = write(dir.path(), "i.csv", "1,0\n0,1\n");
    let v = ok_json(&["vqge", "solve", "--g-dense", &eye, "--s-dense", &eye, "--grid", "30"]);
    let pairs = v["result"]["eigenpairs"].as_array().unwrap();
    assert!(!pairs.is_empty());
    for p in pairs {
        assert!((p["eigenvalue"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    }
    let o = ok_json(&["oracle", "eig", "--g-dense", &eye, "--s-dense", &eye]);
    assert_eq!(o["result"]["distinct"], serde_json::json!([1.0]));
}

#[test]
fn oracle_rejects_indefinite_s() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.csv", "1,0\n0,2\n");
    let s = write(dir.path(), "s.csv", "1,0\n0,-1\n");
    let o = run(&["oracle", "eig", "--g-dense", &g, "--s-dense", &s]);
    assert!(!o.status.success());
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.starts_with("error:") && err.contains("positive definite"), "{err}");
}

#[test]
fn pauli_text_pencil() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.txt", "1.0 ZI\n0.5 XX\n");
    let s = write(dir.path(), "s.txt", "1.0 II\n");
    let v = ok_json(&["oracle", "eig", "--g", &g, "--s", &s]);
    let ev: Vec<f64> = v["result"]["eigenvalues"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    let r = 1.25f64.sqrt();
    for (a, b) in ev.iter().zip([-r, -r, r, r]) {
        assert!((a - b).abs() < 1e-10, "{ev:?}");
    }
}

#[test]
fn runs_are_byte_identical() {
    let args = ["--seed", "5", "--shots", "200", "vqge", "solve", "--builtin", "example2", "--grid", "50"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
    let other = ["--seed", "6", "--shots", "200", "vqge", "solve", "--builtin", "example2", "--grid", "50"];
    assert_ne!(run(&args).stdout, run(&other).stdout);
}

#[test]
fn npe_line_and_transform() {
    let v = ok_json(&["npe", "fit", "--builtin", "line", "--k", "4", "--d", "1"]);
    assert!(v["result"]["eigenvalues"][0].as_f64().unwrap().abs() < 1e-6);

    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "p.csv", "1,0\n0,1\n0,0\n");
    let x = write(dir.path(), "x.csv", "1,2,3\n4,5,6\n");
    let o = run(&["--format", "csv", "npe", "transform", "--projection", &p, "--data", &x]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows: Vec<Vec<f64>> = String::from_utf8(o.stdout)
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(|t| t.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows, vec![vec![1.0, 2.0], vec![4.0, 5.0]]);
}

#[test]
fn overlap_metric_needs_shots() {
    let o = run(&["npe", "fit", "--builtin", "line", "--k", "4", "--d", "1", "--metric", "overlap"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("--shots"));
    let v = ok_json(&["--shots", "500", "npe", "fit", "--builtin", "line", "--k", "4", "--d", "1", "--metric", "overlap"]);
    assert_eq!(v["config"]["params"]["metric"]["kind"], "overlap");
}

#[test]
fn lde_classify_two_blob() {
    let v = ok_json(&["lde", "classify", "--builtin", "two-blob"]);
    assert!(v["result"]["accuracy"].as_f64().unwrap() >= 0.9);
    assert_eq!(v["result"]["predictions"].as_array().unwrap().len(), 100);
}

#[test]
fn lde_fit_then_classify_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let mut train = String::new();
    let mut test = String::new();
    for i in 0..12 {
        let t = i as f64 * 0.1;
        train.push_str(&format!("{},{},1\n{},{},2\n", -1.0 - t, t, 1.0 + t, -t));
        test.push_str(&format!("{},{},1\n{},{},2\n", -1.05 - t, t, 1.05 + t, t));
    }
    let tr = write(dir.path(), "train.csv", &train);
    let te = write(dir.path(), "test.csv", &test);
    let out = dir.path().join("fit");
    let o = run(&["--out", out.to_str().unwrap(), "lde", "fit", "--data", &tr, "--labels", "--k", "3", "--k-prime", "3", "--d", "1"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let proj = out.join("projection.csv");
    assert!(out.join("lde.json").exists());
    let v = ok_json(&[
        "lde", "classify", "--projection", proj.to_str().unwrap(), "--train", &tr, "--test", &te, "--test-labels",
    ]);
    assert_eq!(v["result"]["accuracy"].as_f64().unwrap(), 1.0);
}

#[test]
fn bad_inputs_fail_cleanly() {
    for args in [
        &["vqge", "solve", "--builtin", "nope"][..],
        &["oracle", "eig"][..],
        &["npe", "transform", "--projection", "/nonexistent.csv", "--data", "/nonexistent.csv"][..],
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
    }
}
