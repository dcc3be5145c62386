use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use serde_json::{json, Value};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_semired"))
}

fn input(name: &str, v: &Value) -> PathBuf {
    let path = std::env::temp_dir().join(format!("semired-cli-{}-{name}.json", std::process::id()));
    std::fs::write(&path, v.to_string()).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn q_map(terms: &[(usize, [u32; 2], &str)]) -> Value {
    let coeffs: Vec<Value> = terms.iter().map(|(i, e, v)| json!({"i": i, "exp": e, "v": v})).collect();
    json!({"n": 1, "d": 2, "field": "Q", "coeffs": coeffs})
}

fn x2_plus_c() -> Value {
    json!({"n": 1, "d": 2, "field": "Q(c)", "coeffs": [
        {"i": 0, "exp": [2, 0], "v": "1"},
        {"i": 0, "exp": [0, 2], "v": {"num": ["0", "1"], "den": ["1"]}},
        {"i": 1, "exp": [0, 2], "v": "1"},
    ]})
}

#[test]
fn stab_reports_verdict_and_certificate() {
    let f = input("stab", &q_map(&[(0, [1, 1], "1"), (0, [0, 2], "1"), (1, [0, 2], "1")]));
    let out = run(&["stab", f.to_str().unwrap(), "--strict"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["verdict"], "unstable");
    assert!(v["certificate"].is_object());

    let f = input("stab-stable", &q_map(&[(0, [2, 0], "1"), (0, [0, 2], "1"), (1, [0, 2], "1")]));
    let v = stdout_json(&run(&["stab", f.to_str().unwrap()]));
    assert_eq!(v["verdict"], "stable");
}

#[test]
fn stab_reads_stdin() {
    let mut child = bin().args(["stab", "-"]).stdin(Stdio::piped()).stdout(Stdio::piped()).spawn().unwrap();
    let map = q_map(&[(0, [2, 0], "1"), (1, [0, 2], "1")]);
    child.stdin.take().unwrap().write_all(map.to_string().as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["verdict"], "stable");
}

#[test]
fn parse_errors_exit_with_two() {
    assert_eq!(run(&["stab", "/nonexistent/map.json"]).status.code(), Some(2));
    let f = input("garbage", &json!({"n": 1}));
    assert_eq!(run(&["stab", f.to_str().unwrap()]).status.code(), Some(2));
    let f = input("place", &x2_plus_c());
    assert_eq!(run(&["reduce", f.to_str().unwrap(), "--place", "p:4"]).status.code(), Some(2));
}

#[test]
fn undetermined_verdict_exits_with_three() {
    let map = json!({"n": 2, "d": 2, "field": "Q", "coeffs": [
        {"i": 0, "exp": [1, 0, 1], "v": "1"},
        {"i": 1, "exp": [0, 1, 1], "v": "1"},
        {"i": 2, "exp": [2, 0, 0], "v": "1"},
        {"i": 2, "exp": [0, 2, 0], "v": "1"},
    ]});
    let out = run(&["stab", input("undetermined", &map).to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(stdout_json(&out)["verdict"], "undetermined");
}

#[test]
fn text_and_json_agree() {
    let f = input("parity", &q_map(&[(0, [2, 0], "1"), (0, [1, 1], "-1"), (1, [0, 2], "1")]));
    let v = stdout_json(&run(&["stab", f.to_str().unwrap()]));
    let text = String::from_utf8(run(&["--format", "text", "stab", f.to_str().unwrap()]).stdout).unwrap();
    assert!(text.lines().any(|l| l == format!("verdict = {}", v["verdict"])), "{text}");
}

#[test]
fn output_is_deterministic() {
    let f = input("determinism", &x2_plus_c());
    let a = run(&["reduce", f.to_str().unwrap(), "--place", "inf"]);
    let b = run(&["reduce", f.to_str().unwrap(), "--place", "inf"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn reduce_polynomial_family_at_infinity() {
    let f = input("reduce", &x2_plus_c());
    let v = stdout_json(&run(&["reduce", f.to_str().unwrap(), "--place", "inf"]));
    assert_eq!(v["stability"]["verdict"], "stable");
    assert_eq!(v["ramification"], 2);
}

#[test]
fn scan_finds_the_bad_place() {
    let f = input("scan", &x2_plus_c());
    let out = run(&["scan", f.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["bad_places"], json!(["inf"]));
}

#[test]
fn bundle_split_and_assemble() {
    let t = json!([[{"1": "1"}, {"1": "-1/2"}], [{}, {"0": "1"}]]);
    let v = stdout_json(&run(&["bundle", "split", input("split", &t).to_str().unwrap()]));
    assert_eq!(v["splitting_type"], json!([0, 1]));
    assert_eq!(v["verified"], true);

    let charts = json!({
        "finite": {"n": 1, "d": 2, "field": "Q(c)", "coeffs": [
            {"i": 0, "exp": [2, 0], "v": "1"},
            {"i": 0, "exp": [0, 2], "v": {"num": ["0", "1/2", "-1/4"], "den": ["1"]}},
            {"i": 1, "exp": [0, 2], "v": "1"}]},
        "infinite": {"n": 1, "d": 2, "field": "Q(c)", "coeffs": [
            {"i": 0, "exp": [2, 0], "v": "1"},
            {"i": 0, "exp": [1, 1], "v": "-1"},
            {"i": 0, "exp": [0, 2], "v": {"num": ["0", "1"], "den": ["1"]}},
            {"i": 1, "exp": [0, 2], "v": {"num": ["0", "1"], "den": ["1"]}}]},
        "transition": [[{"-1": "1"}, {"0": "1/2"}], [{}, {"0": "1"}]],
    });
    let out = run(&["bundle", "assemble", input("assemble", &charts).to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout_json(&out)["splitting_type"], json!([0, 1]));
}

#[test]
fn invariants_and_automorphisms() {
    let sq = input("square", &q_map(&[(0, [2, 0], "1"), (1, [0, 2], "1")]));
    let v = stdout_json(&run(&["inv", "sigma", sq.to_str().unwrap()]));
    assert_eq!((v["sigma1"].clone(), v["sigma2"].clone()), (json!("2"), json!("0")));
    let v = stdout_json(&run(&["aut", sq.to_str().unwrap()]));
    assert_eq!(v["order"], 2);

    let poly = input("poly-obstruction", &q_map(&[(0, [1, 1], "5"), (0, [0, 2], "7"), (1, [0, 2], "2")]));
    let v = stdout_json(&run(&["inv", "obstruction", poly.to_str().unwrap()]));
    assert_eq!(v["repeated_root"], true);
}

#[test]
fn completing_the_square() {
    let f = input("poly", &json!({"gamma": "2", "delta": "4", "eps": "1"}));
    let out = run(&["poly", f.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    // 2z^2 + 4z + 1 is conjugate to z^2
    assert_eq!(stdout_json(&out)["kappa"], json!({"num": ["0"], "den": ["1"]}));
}

#[test]
fn builtin_corpus_verifies() {
    let out = run(&["corpus", "verify"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(stdout_json(&out)["all_ok"], true);
}

#[test]
fn corrupted_corpus_fails() {
    let bad = json!([{"name": "wrong", "kind": "cocycle", "provenance": "oracle",
        "cocycle": [[{"1": "1"}, {}], [{}, {"0": "1"}]], "expected": {"splitting_type": [0, 0]}}]);
    let out = run(&["corpus", "verify", "--file", input("bad-corpus", &bad).to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}
