use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ecl-bargain"))
        .args(args)
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json report")
}

fn temp(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("ecl-bargain-cli-{}-{name}", std::process::id()))
}

#[test]
fn solve_alice_and_bob() {
    let r = json(&bin(&["solve", "--game", "games/alice-bob.json"]));
    let a = r["decomposition"][0][0].as_f64().unwrap();
    let b = r["decomposition"][1][0].as_f64().unwrap();
    assert!((a - 8.15).abs() < 0.01 && (b - 3.15).abs() < 0.01, "{a} {b}");
}

#[test]
fn solve_reports_blocking_pair() {
    let r = json(&bin(&["solve", "--game", "games/blocking-game.json"]));
    let alpha = r["core"].as_array().unwrap().iter().find(|c| c["notion"] == "alpha").unwrap();
    assert_eq!(alpha["verdict"]["blocking"], serde_json::json!([0, 1]));
}

#[test]
fn solve_overrides_and_out_file() {
    let path = temp("threat.json");
    let out = bin(&["solve", "--game", "games/threat-game.json", "--disagreement", "threat", "--out", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    std::fs::remove_file(&path).ok();
    let d: Vec<f64> = serde_json::from_value(r["disagreement"].clone()).unwrap();
    assert_eq!(d, [-3.0, 2.0]);
}

#[test]
fn invalid_documents_exit_2() {
    let path = temp("empty.json");
    std::fs::write(&path, r#"{"schema": 1, "kind": "normal-form", "game": {"actions": [], "payoffs": []}}"#).unwrap();
    let out = bin(&["solve", "--game", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(bin(&["solve", "--game", "does-not-exist.json"]).status.code(), Some(2));
    assert_eq!(bin(&["solve", "--game", "games/variance-counterexample.json"]).status.code(), Some(2));
    assert_eq!(bin(&["sweep", "--model", "log"]).status.code(), Some(2));
    assert_eq!(bin(&["sweep", "--model", "sqrt", "--p-min", "0.2"]).status.code(), Some(2));
}

#[test]
fn sweep_csv_is_deterministic() {
    let a = bin(&["sweep", "--model", "sqrt"]);
    let b = bin(&["sweep", "--model", "sqrt"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.starts_with("p,share_numeric,gains_numeric,share_closed,gains_closed,residual\n"));
    assert!(!text.contains('\r') && text.ends_with('\n'));
    assert_eq!(text.lines().count(), 12);
    for line in text.lines().skip(1) {
        let residual: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!(residual <= 1e-5, "{line}");
    }
    let log = bin(&["sweep", "--model", "log", "--r", "1e9", "--step", "0.1"]);
    assert!(log.status.success());
    assert_eq!(String::from_utf8(log.stdout).unwrap().lines().count(), 7);
}

#[test]
fn verify_exit_codes() {
    let out = bin(&["verify", "--only", "alice-bob,8"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 2);
    assert_eq!(bin(&["verify", "--only", "1", "--tol", "1e-15"]).status.code(), Some(1));
    assert_eq!(bin(&["verify", "--only", "nothing"]).status.code(), Some(2));
}
