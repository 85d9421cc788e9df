use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_sharpconvex"));
    cmd.env_remove("SHARPCONVEX_QUAD_ORDER");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut full = vec!["--format", "json"];
    full.extend_from_slice(args);
    let out = run(&full);
    let v = serde_json::from_slice(&out.stdout).expect("json on stdout");
    (out.status.code().unwrap(), v)
}

#[test]
fn verify_theorem_at_sharp_constant() {
    let (code, v) = json(&["verify-theorem", "--n", "2", "--p", "1", "--a-grid", "1e-3:1e2:40:log"]);
    assert_eq!(code, 0);
    assert_eq!(v["pass"], true);
    assert_eq!(v["summary"]["lambda"], 0.5);
    assert_eq!(v["rows"].as_array().unwrap().len(), 40);
}

#[test]
fn verify_theorem_above_sharp_constant_fails() {
    let (code, v) = json(&[
        "verify-theorem",
        "--n",
        "2",
        "--p",
        "1",
        "--lambda",
        "0.6",
        "--a-grid",
        "1e-3:1e2:40:log",
    ]);
    assert_eq!(code, 1);
    assert_eq!(v["pass"], false);
    let witness = v["summary"]["witness"].as_f64().unwrap();
    assert!(witness < 1.0, "witness {witness}");
    assert!(v["summary"]["worst_margin"].as_f64().unwrap() < 0.0);
}

#[test]
fn r_star_sharp_point() {
    let (code, v) = json(&["r-star", "--m", "-1", "--p", "2", "--q", "4"]);
    assert_eq!(code, 0);
    let r = v["summary"]["r_star"].as_f64().unwrap();
    assert!((r - 1.0 / 3f64.sqrt()).abs() < 1e-3, "r* = {r}");
    assert_eq!(v["rows"][0]["label"], "consistent with sharpness");
}

#[test]
fn r_star_with_explicit_r_checks_inequality() {
    assert_eq!(run(&["r-star", "--m", "0", "--p", "2", "--q", "4", "--r", "0.6"]).status.code(), Some(0));
    assert_eq!(run(&["r-star", "--m", "0", "--p", "2", "--q", "4", "--r", "0.8"]).status.code(), Some(1));
}

#[test]
fn invalid_input_exits_2() {
    assert_eq!(run(&["scan", "--m", "0:1:x"]).status.code(), Some(2));
    assert_eq!(run(&["--tol", "1", "selftest"]).status.code(), Some(2));
    assert_eq!(run(&["verify-theorem", "--n", "1", "--p", "1"]).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn json_output_is_deterministic() {
    let args = ["--format", "json", "scan", "--m", "0,1", "--p", "2", "--q", "4"];
    let a = run(&args);
    let b = run(&["--jobs", "1"].iter().chain(args.iter()).copied().collect::<Vec<_>>());
    assert_eq!(a.status.code(), Some(0));
    let va: Value = serde_json::from_slice(&a.stdout).unwrap();
    let vb: Value = serde_json::from_slice(&b.stdout).unwrap();
    assert_eq!(va["rows"], vb["rows"]);
    assert_eq!(run(&args).stdout, a.stdout);
}

#[test]
fn csv_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let out = run(&["--out", path.to_str().unwrap(), "best-lambda", "--n", "3", "--p", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.lines().count() > 1);
}

#[test]
fn figures_written() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["--out", dir.path().to_str().unwrap(), "figures"]);
    assert_eq!(out.status.code(), Some(0));
    for name in ["fig1.csv", "fig2.csv"] {
        let text = std::fs::read_to_string(dir.path().join(name)).unwrap();
        assert!(text.lines().count() > 100, "{name}");
    }
}

#[test]
fn quad_order_from_environment() {
    let out = bin()
        .env("SHARPCONVEX_QUAD_ORDER", "96")
        .args(["--format", "json", "r-star", "--m", "0", "--p", "1", "--q", "2"])
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["config"]["quad_order"], 96);
    let flag = run(&["--quad-order", "128", "--format", "json", "r-star", "--m", "0", "--p", "1", "--q", "2"]);
    let v: Value = serde_json::from_slice(&flag.stdout).unwrap();
    assert_eq!(v["config"]["quad_order"], 128);
}
