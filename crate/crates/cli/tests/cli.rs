use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

const ODDS: &str = r#"{"op":"mod_eq","modulus":"2","residue":"1"}"#;
const MULT4: &str = r#"{"op":"mod_eq","modulus":"4","residue":"0"}"#;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ipstar"))
        .env_remove("IPSTAR_FORMAT")
        .env_remove("IPSTAR_MAX_NODES")
        .args(args)
        .output()
        .expect("binary runs")
}

/// Run with `--format machine` and parse the single-line report.
fn machine(args: &[&str]) -> (i32, Value) {
    let out = run(&[&["--format", "machine"], args].concat());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 1, "one report line expected: {text}");
    let report: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(report["tool"], "ipstar");
    (out.status.code().unwrap(), report)
}

fn strings(v: &Value) -> Vec<&str> {
    v.as_array().unwrap().iter().map(|x| x.as_str().unwrap()).collect()
}

#[test]
fn generators_report_values() {
    let (code, r) = machine(&["fs", "--seq", "1,2,4"]);
    assert_eq!(code, 0);
    assert_eq!(r["status"], "ok");
    assert_eq!(strings(&r["result"]["values"]), ["1", "2", "3", "4", "5", "6", "7"]);

    let (_, r) = machine(&["fp", "--seq", "[2,3]"]);
    assert_eq!(strings(&r["result"]["values"]), ["2", "3", "6"]);
}

#[test]
fn exit_codes_follow_status() {
    let (code, r) = machine(&["refute-aip", "--oracle", ODDS, "--n", "20", "--k", "2"]);
    assert_eq!((code, r["status"].as_str()), (0, Some("refuted")));
    assert_eq!(strings(&r["result"]["witness"]), ["2", "4"]);

    let (code, r) = machine(&["extract", "--oracle", ODDS, "--seq", "1..10", "--k", "2"]);
    assert_eq!((code, r["status"].as_str()), (1, Some("exhausted")));
    assert!(r["result"]["diagnostic"].is_string());

    let (code, r) = machine(&["greedy-fsfp", "--oracle", MULT4, "--seq", "1..64", "--k", "2", "--max-nodes", "3"]);
    assert_eq!((code, r["status"].as_str()), (3, Some("budget_exceeded")));
}

#[test]
fn bad_input_is_an_error_report() {
    for args in [
        &["fs", "--seq", "[0]"][..],
        &["fs", "--seq", "[1,"][..],
        &["refute-aip", "--oracle", r#"{"op":"bogus"}"#, "--n", "5", "--k", "1"][..],
        &["shift", "--oracle", "/no/such/file.json", "--y", "3"][..],
    ] {
        let (code, r) = machine(args);
        assert_eq!(code, 2, "{args:?}");
        assert_eq!(r["status"], "error");
        assert!(r["result"]["message"].is_string());
    }
}

#[test]
fn certificate_file_round_trips_through_verify() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("fsfp.json");
    let cert_arg = cert.to_str().unwrap();
    let (code, r) = machine(&["greedy-fsfp", "--oracle", MULT4, "--seq", "1..64", "--k", "2", "--cert-out", cert_arg]);
    assert_eq!(code, 0);
    assert_eq!(strings(&r["result"]["chosen"]), ["4", "8"]);

    let (code, r) = machine(&["verify", "--cert", cert_arg]);
    assert_eq!((code, r["status"].as_str()), (0, Some("pass")));

    // break the certificate: claim 12 where the blocks sum to 8
    let mut doc: Value = serde_json::from_str(&fs::read_to_string(&cert).unwrap()).unwrap();
    assert_eq!(strings(&doc["chosen"]), ["4", "8"]);
    doc["chosen"][1] = "12".into();
    fs::write(&cert, serde_json::to_string_pretty(&doc).unwrap()).unwrap();
    let (code, r) = machine(&["verify", "--cert", cert_arg]);
    assert_eq!((code, r["status"].as_str()), (1, Some("fail")));
}

#[test]
fn verify_accepts_a_saved_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = run(&["--format", "machine", "greedy-exp", "--oracle", ODDS, "--m", "2"]);
    assert_eq!(out.status.code(), Some(0));
    fs::write(&path, &out.stdout).unwrap();
    let (code, r) = machine(&["verify", "--cert", path.to_str().unwrap()]);
    assert_eq!((code, r["status"].as_str()), (0, Some("pass")));
}

#[test]
fn text_output_names_the_status() {
    let out = run(&["weak-schur", "--r", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("weak-schur: ok"), "{text}");
    assert!(text.contains("number: 9"), "{text}");
}

#[test]
fn environment_selects_the_format() {
    let out = Command::new(env!("CARGO_BIN_EXE_ipstar"))
        .env("IPSTAR_FORMAT", "machine")
        .args(["folkman", "--r", "2", "--k", "2"])
        .output()
        .unwrap();
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["result"]["number"], 5);
}
