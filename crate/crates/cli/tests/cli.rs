use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gadic-bases")).args(args).output().expect("binary runs")
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().expect("exit code")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("JSON output")
}

fn parts(v: &Value) -> Vec<&str> {
    v["parts"].as_array().unwrap().iter().map(|p| p.as_str().unwrap()).collect()
}

#[test]
fn construct_thm2() {
    let v = json(&["construct", "thm2", "--g", "2", "--h", "5", "--t", "2", "--m", "7"]);
    assert_eq!(v["h"], 5);
    assert_eq!(v["period"], 28);
    assert_eq!(v["pattern"].as_array().unwrap().len(), 28);
}

#[test]
fn construct_rejects_small_h() {
    let out = run(&["construct", "thm2", "--g", "2", "--h", "4", "--t", "2", "--m", "7"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("h > g^t(g-1) violated"));
}

#[test]
fn construct_thm1() {
    let v = json(&["construct", "thm1", "--g", "2", "--h", "4", "--t", "2", "--m1", "65", "--gap", "65"]);
    assert_eq!(v["h"], 4);
    assert_eq!(v["period"], 195);
}

#[test]
fn decompose_examples() {
    let v = json(&["decompose", "thm2", "--n", "8", "--g", "2", "--h", "5", "--t", "2", "--m", "7"]);
    assert_eq!(parts(&v), ["3", "1", "1", "1", "2"]);
    let v = json(&["decompose", "thm1", "--n", "200", "--g", "2", "--h", "4", "--t", "2", "--m1", "65", "--gap", "65"]);
    assert_eq!(parts(&v), ["64", "8", "64", "64"]);
    assert_eq!(v["trace"]["case"], "2.3-k3");
}

#[test]
fn decompose_huge_decimal() {
    let n = format!("1{}", "0".repeat(150));
    let v = json(&["decompose", "thm2", "--n", &n]);
    assert_eq!(v["n"], n.as_str());
    assert_eq!(v["parts"].as_array().unwrap().len(), 5);
}

#[test]
fn out_of_range_and_bad_input() {
    assert_eq!(code(&["decompose", "thm1", "--n", "100"]), 1);
    assert_eq!(code(&["decompose", "thm2", "--n", "4"]), 1);
    assert_eq!(code(&["decompose", "thm2", "--n", "-3"]), 2);
    assert_eq!(code(&["decompose", "thm2", "--n", "8", "--format", "csv"]), 2);
    assert_eq!(code(&["construct", "thm1", "--m1", "10"]), 2);
}

#[test]
fn verify_small_ranges() {
    let v = json(&["verify", "thm2", "--N", "4096"]);
    assert_eq!(v["passed"], true);
    assert_eq!(v["decomposed"], 4092);
    let v = json(&["verify", "lemma1a", "--g", "2", "--N", "100000"]);
    assert_eq!(v["passed"], true);
    let v = json(&["verify", "lemma1c", "--N", "4096"]);
    assert_eq!(v["passed"], true);
    let v = json(&["verify", "faults", "--samples", "12"]);
    assert_eq!(v["correct"], 12);
}

#[test]
fn verify_thm1_case_table() {
    let out = run(&["verify", "thm1", "--samples", "5", "--seed", "42", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("case,reachable,samples,valid,variants,note"));
    assert_eq!(lines.count(), 12);
    assert!(text.contains("\n2.3-k3,true,5,5,"));
}

#[test]
fn rep_table_has_one_row_per_n() {
    let out = run(&["report", "rep", "--set", "naturals", "--N", "64"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 64);
    // ordered pairs (i, n-i) with 1 <= i <= n-1
    assert_eq!(rows[9], "10,9");
}

#[test]
fn minimality_report_csv() {
    let out = run(&["report", "minimality", "--set", "block", "--g", "3", "--h", "4", "--t", "2", "--N", "6561", "--B", "30"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("a,count,min,max,candidate\n1,"));
}

#[test]
fn outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, args: &[&str]| {
        let path = dir.path().join(name);
        let mut all = args.to_vec();
        all.extend(["--out", path.to_str().unwrap()]);
        assert!(run(&all).status.success());
        std::fs::read(path).unwrap()
    };
    let args = ["verify", "thm1", "--samples", "20", "--seed", "7"];
    assert_eq!(write("a.json", &args), write("b.json", &args));
    let args = ["report", "growth", "--set", "thm2", "--N", "12"];
    assert_eq!(write("a.csv", &args), write("b.csv", &args));
}
