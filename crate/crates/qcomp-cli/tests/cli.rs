//! End-to-end runs of the `qcomp` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn qcomp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcomp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = qcomp(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

#[test]
fn rep3_table_matches_the_syndrome_table() {
    let out = qcomp(&[
        "--no-timestamp",
        "--format",
        "csv",
        "codes",
        "table",
        "rep3",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 4);
    let expected = [
        ("(000,111)", "none", "00"),
        ("(100,011)", "X1", "10"),
        ("(010,101)", "X2", "01"),
        ("(001,110)", "X3", "11"),
    ];
    for (row, (pair, err, syn)) in rows.iter().zip(expected) {
        assert!(row.contains(&format!("\"{pair}\",{err},{syn},")), "{row}");
    }
}

#[test]
fn shor9_corrects_all_single_errors_with_shared_phase_corrections() {
    let v = json(&["codes", "decode-demo", "shor9"]);
    assert_eq!(v["result"]["corrected"], 27);
    assert_eq!(v["result"]["total"], 27);
    let shared = v["result"]["shared_corrections"].as_array().unwrap();
    assert!(shared
        .iter()
        .any(|c| c["errors"] == serde_json::json!(["Z4", "Z5", "Z6"])));
}

#[test]
fn unknown_code_is_bad_input() {
    let out = qcomp(&["codes", "table", "unknown"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown"));
    assert!(out.stdout.is_empty());
}

#[test]
fn unknown_flag_is_rejected() {
    let out = qcomp(&["qkd", "threshold", "--protocol", "bb84", "--bogus", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn random_uncertainty_runs_have_nonnegative_slack() {
    for rel in ["mu", "berta", "tri"] {
        let v = json(&["uncertainty", rel, "random:200:7"]);
        assert_eq!(v["rows"].as_array().unwrap().len(), 200);
        assert_eq!(v["result"]["violations"], 0);
        assert!(v["result"]["min_slack"].as_f64().unwrap() >= -1e-9);
    }
}

#[test]
fn epr_fixture_saturates_berta() {
    let v = json(&["uncertainty", "berta", &fixture("epr.json")]);
    let row = &v["rows"][0];
    assert!(row["slack"].as_f64().unwrap().abs() <= 1e-9);
    assert!((row["extra"].as_f64().unwrap() + 1.0).abs() <= 1e-10);
}

#[test]
fn malformed_state_file_is_bad_input() {
    let path = std::env::temp_dir().join("qcomp-cli-malformed.json");
    std::fs::write(&path, "{\"labels\": 3}").unwrap();
    let out = qcomp(&["uncertainty", "mu", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bb84_threshold_report() {
    let v = json(&["qkd", "threshold", "--protocol", "bb84"]);
    let d = v["result"]["delta_star"].as_f64().unwrap();
    assert!((d - 0.1100).abs() <= 1e-3, "{d}");
    assert_eq!(v["parameters"]["protocol"], "bb84");
    assert!(v["result"]["solver_evals"].as_u64().unwrap() > 0);
}

#[test]
fn sixstate_optimized_threshold_report() {
    let v = json(&["qkd", "optimize", "--protocol", "sixstate", "--m", "1"]);
    let d = v["result"]["delta_star"].as_f64().unwrap();
    assert!((d - 0.141).abs() <= 2e-3, "{d}");
}

#[test]
fn solver_failure_exit_code() {
    let out = qcomp(&["qkd", "threshold", "--protocol", "bb84", "--q", "0.5"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn capability_exit_code() {
    let out = qcomp(&["distill", "sim", "--p", "0.89,0,0.11,0", "--n", "25"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn distill_sim_report_fields() {
    let v = json(&[
        "distill",
        "sim",
        "--p",
        "0.89,0,0.11,0",
        "--n",
        "15",
        "--trials",
        "2000",
        "--seed",
        "1",
    ]);
    let r = &v["result"];
    assert_eq!(v["seed"], 1);
    assert_eq!(r["trials"], 2000);
    assert!((r["rate"].as_f64().unwrap() - 0.4).abs() < 1e-12);
    let f = r["logical_error_rate"].as_f64().unwrap();
    assert!((0.0..1.0).contains(&f));
}

#[test]
fn identical_runs_are_byte_identical_without_timestamp() {
    let args = [
        "--no-timestamp",
        "--seed",
        "3",
        "distill",
        "sim",
        "--p",
        "0.9,0.04,0.04,0.02",
        "--n",
        "10",
        "--trials",
        "200",
    ];
    let a = qcomp(&args);
    let b = qcomp(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let with_ts = json(&args[1..]);
    assert!(with_ts["timestamp_unix"].is_u64());
}

#[test]
fn out_flag_writes_the_report_file() {
    let path = std::env::temp_dir().join("qcomp-cli-sweep.csv");
    let out = qcomp(&[
        "--format",
        "csv",
        "--out",
        path.to_str().unwrap(),
        "qkd",
        "sweep",
        "--protocol",
        "bb84",
        "--steps",
        "4",
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "command,version,seed,protocol,delta,q,m,rate"
    );
    assert_eq!(lines.count(), 4);
}
