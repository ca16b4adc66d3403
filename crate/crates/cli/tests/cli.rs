use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/testdata")
        .join(name)
        .display()
        .to_string()
}

fn collana(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_collana")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn analyze_sort_succeeds() {
    let o = collana(&["analyze", &data("sort.hc"), &data("sort.ca")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("7 clauses: 7 proved, 0 refuted, 0 unknown"));
}

#[test]
fn analyze_json_report() {
    let o = collana(&["analyze", &data("split_dedup.hc"), &data("split_dedup.ca"), "--report", "json", "--jobs", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["mode"], "set");
    assert_eq!(v["summary"]["proved"], 4);
    assert_eq!(v["clauses"].as_array().unwrap().len(), 4);
}

#[test]
fn analyze_mutant_fails() {
    let o = collana(&["analyze", &data("sort_mutant.hc"), &data("sort.ca")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("Refuted"));
}

#[test]
fn analyze_reports_diagnostics() {
    let o = collana(&["analyze", &data("sort.hc"), &data("nope.ca")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cannot read"));
    let o = collana(&["analyze", &data("sort.hc"), &data("empty.llq")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("empty.llq:"));
}

#[test]
fn analyze_flags() {
    let o = collana(&["analyze", &data("btree.hc"), &data("btree.ca"), "--derive-ctors", "--trace"]);
    assert_eq!(o.status.code(), Some(0));
    let o = collana(&["analyze", &data("sort.hc"), &data("sort.ca"), "--mode", "set", "--max-states", "10"]);
    assert!(stdout(&o).contains("(set mode)"));
}

#[test]
fn prove_sequents() {
    let o = collana(&["prove", &data("sort_step.llq"), "--trace"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("BC with"));
    let o = collana(&["prove", &data("converse.llq")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("Refuted"));
    let o = collana(&["prove", &data("empty.llq"), "--report", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["status"], "Proved");
}

#[test]
fn oracle_command() {
    let o = collana(&["oracle", &data("sort.hc"), &data("sort.ca"), "--trials", "100", "--seed", "42"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("sort: 100 trials on inputs [1]: 100 passed, 0 failed"));
    let o = collana(&["oracle", &data("sort_mutant.hc"), &data("sort.ca"), "--trials", "20"]);
    assert_eq!(o.status.code(), Some(1));
    let o = collana(&["oracle", &data("stream.hc"), &data("stream.ca")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cannot test"));
}

#[test]
fn bad_arguments_exit_with_two() {
    assert_eq!(collana(&["analyze"]).status.code(), Some(2));
    assert_eq!(collana(&["frobnicate"]).status.code(), Some(2));
}
