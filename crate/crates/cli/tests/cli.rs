use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_colortree")).args(args).output().expect("run colortree")
}

fn ok(args: &[&str]) -> Output {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn json(bytes: &[u8]) -> Value {
    serde_json::from_slice(bytes).expect("json output")
}

fn csv_rows(bytes: &[u8]) -> Vec<Vec<String>> {
    String::from_utf8(bytes.to_vec()).unwrap().lines().skip(1).map(|l| l.split(',').map(String::from).collect()).collect()
}

#[test]
fn sweep_roots() {
    let sec51 = json(&ok(&["sweep", "--family", "sec51", "--param-range", "0.1:0.9"]).stderr);
    assert!((sec51["root"].as_f64().unwrap() - 0.417).abs() <= 0.001);
    let pm = json(&ok(&["sweep", "--family", "pointmass-b2", "--param-range", "0.9:0.1"]).stderr);
    assert!((pm["root"].as_f64().unwrap() - 0.5).abs() <= 1e-6);
}

#[test]
fn classify_verdicts() {
    let rec = json(&ok(&["classify", "--env", "sec51:0.6"]).stdout);
    assert_eq!(rec["rwre"], "PositiveRecurrent");
    assert_eq!(rec["y_regime"], "Finite");
    let tr = json(&ok(&["classify", "--env", "sec51:0.3"]).stdout);
    assert_eq!(tr["rwre"], "Transient");
    assert_eq!(tr["rde"], "NoSolution");
}

#[test]
fn malformed_input_exits_2_naming_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"b": 2, "entries": [[{"kind": "point_mass", "value": 0.5}, {"kind": "uniform", "lo": 0.9, "hi": 0.1}], [{"kind": "point_mass", "value": 0.5}, {"kind": "point_mass", "value": 0.5}]]}"#).unwrap();
    let out = run(&["classify", "--env", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("(1,2)"), "{}", String::from_utf8_lossy(&out.stderr));

    std::fs::write(&path, r#"{"b": 2}"#).unwrap();
    let out = run(&["classify", "--env", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("entries"));
}

#[test]
fn simulations_are_deterministic_across_thread_counts() {
    for args in [
        &["simulate", "tree", "--env", "sec51:0.5", "--depth", "5", "--trials", "200", "--seed", "7", "--s", "1"][..],
        &["simulate", "brw", "--spec", "normal01", "--t", "8", "--trials", "6", "--seed", "3"],
        &["simulate", "walk", "--rwre", "sec51:0.5", "--steps", "2000", "--walks", "8", "--seed", "4"],
    ] {
        let one = ok(&[&["--threads", "1"][..], args].concat());
        let two = ok(&[&["--threads", "2"][..], args].concat());
        assert_eq!(one.stdout, two.stdout, "{args:?}");
        assert_eq!(one.stdout, ok(args).stdout, "{args:?}");
    }
}

#[test]
fn brw_reports_gaussian_speed() {
    let out = ok(&["simulate", "brw", "--spec", "normal01", "--t", "4", "--trials", "2", "--seed", "1"]);
    for row in csv_rows(&out.stdout) {
        assert!((row[7].parse::<f64>().unwrap() + 1.17741).abs() < 1e-5);
    }
}

#[test]
fn rde_point_mass_fixed_point() {
    let out = ok(&["simulate", "rde", "--env", "pointmass-b2:0.3", "--pool", "100000", "--iters", "200", "--seed", "1"]);
    let s = json(&out.stderr);
    for m in s["final_means"].as_array().unwrap() {
        assert!((m.as_f64().unwrap() - 2.5).abs() <= 1e-3);
    }
    let diverge = run(&["simulate", "rde", "--env", "pointmass-b2:0.8", "--pool", "1000", "--iters", "200", "--seed", "1"]);
    assert_eq!(diverge.status.code(), Some(3));
}

#[test]
fn rate_function_shapes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ln.json");
    std::fs::write(&path, r#"{"b": 2, "entries": [[{"kind": "log_normal", "mu": 0, "sigma": 1}, {"kind": "log_normal", "mu": 0, "sigma": 1}], [{"kind": "log_normal", "mu": 0, "sigma": 1}, {"kind": "log_normal", "mu": 0, "sigma": 1}]]}"#).unwrap();
    let out = ok(&["rate-function", "--env", path.to_str().unwrap(), "--z", "-1:2:13"]);
    for row in csv_rows(&out.stdout) {
        let z: f64 = row[0].parse().unwrap();
        let rate: f64 = row[1].parse().unwrap();
        let want = if z <= 0.0 { 0.0 } else { z * z / 2.0 };
        assert!((rate - want).abs() < 1e-6, "z = {z}: {rate} vs {want}");
    }
    let pm = ok(&["rate-function", "--env", "pointmass-b2:0.5", "--z", "-1.5:1:6"]);
    let drift = 0.5f64.ln();
    for row in csv_rows(&pm.stdout) {
        let z: f64 = row[0].parse().unwrap();
        if z < drift - 1e-9 {
            assert_eq!(row[1].parse::<f64>().unwrap(), 0.0);
        } else if z > drift + 1e-9 {
            assert_eq!(row[1], "+inf");
        }
    }
}

#[test]
fn manifest_digests_match_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("tree.csv");
    ok(&["simulate", "tree", "--env", "sec51:0.5", "--depth", "4", "--trials", "50", "--seed", "9", "--out", out.to_str().unwrap()]);
    let manifest = json(&std::fs::read(dir.path().join("tree.csv.manifest.json")).unwrap());
    assert_eq!(manifest["command"], "simulate tree");
    assert_eq!(manifest["seed"], 9);
    let digest = manifest["outputs"][0]["sha256"].as_str().unwrap();
    assert_eq!(digest, colortree::output::sha256_hex(&std::fs::read(&out).unwrap()));
}

#[test]
fn failed_runs_leave_no_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rde.csv");
    let r = run(&["simulate", "rde", "--env", "pointmass-b2:0.8", "--pool", "1000", "--iters", "200", "--seed", "1", "--out", out.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(3));
    assert!(std::fs::read_dir(dir.path()).unwrap().next().is_none());
    assert!(!Path::new(&out).exists());
}
