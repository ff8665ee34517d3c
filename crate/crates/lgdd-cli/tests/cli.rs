//! End-to-end checks of the command-line interface: exit codes, document
//! output, and the verify loop.

use std::path::PathBuf;
use std::process::{Command, Output};

fn lgdd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lgdd"))
        .args(args)
        .env_remove("LGDD_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn temp_path(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("lgdd-cli-test-{}-{name}", std::process::id()))
}

#[test]
fn building_a_small_large_set_emits_a_document() {
    let out = lgdd(&["build", "1", "2", "4"]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).expect("JSON document");
    assert_eq!(doc["kind"], "large_set");
    assert_eq!(doc["payload"]["members"].as_array().unwrap().len(), 4);
}

#[test]
fn inadmissible_parameters_exit_one() {
    let out = lgdd(&["plan", "9", "2", "8"]);
    assert_eq!(out.status.code(), Some(1), "{out:?}");
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("no such design"), "{err}");
}

#[test]
fn unreachable_parameters_exit_two() {
    let out = lgdd(&["plan", "1", "2", "10"]);
    assert_eq!(out.status.code(), Some(2), "{out:?}");
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("blocked"), "{err}");
}

#[test]
fn built_documents_verify_and_tampered_ones_fail() {
    let path = temp_path("roundtrip.json");
    let out = lgdd(&["build", "1", "3", "3", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let ok = lgdd(&["verify", path.to_str().unwrap()]);
    assert_eq!(ok.status.code(), Some(0), "{ok:?}");
    assert!(String::from_utf8_lossy(&ok.stdout).starts_with("ok:"));

    let text = std::fs::read_to_string(&path).unwrap();
    let mut doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    doc["payload"]["members"][0][0][0][2] = serde_json::json!(5);
    std::fs::write(&path, serde_json::to_string(&doc).unwrap()).unwrap();
    let bad = lgdd(&["verify", path.to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(3), "{bad:?}");
    let _ = std::fs::remove_file(&path);
}

#[test]
fn searches_report_their_outcome_through_exit_codes() {
    let found = lgdd(&["search", "lr", "9"]);
    assert_eq!(found.status.code(), Some(0), "{found:?}");
    let doc: serde_json::Value = serde_json::from_slice(&found.stdout).unwrap();
    assert_eq!(doc["kind"], "lr");

    let empty = lgdd(&["search", "ls", "7", "1"]);
    assert_eq!(empty.status.code(), Some(1), "{empty:?}");

    let starved = lgdd(&["--max-nodes", "5", "search", "lgdd", "1", "3", "5"]);
    assert_eq!(starved.status.code(), Some(2), "{starved:?}");
}

#[test]
fn catalogue_entries_export_and_verify() {
    let path = temp_path("catalog.json");
    let out = lgdd(&["catalog", "v5", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let ok = lgdd(&["verify", path.to_str().unwrap()]);
    assert_eq!(ok.status.code(), Some(0), "{ok:?}");
    let _ = std::fs::remove_file(&path);

    let integrity = lgdd(&["catalog", "integrity"]);
    assert_eq!(integrity.status.code(), Some(0), "{integrity:?}");
}

#[test]
fn nonsense_usage_exits_four() {
    let unknown = lgdd(&["frobnicate"]);
    assert_eq!(unknown.status.code(), Some(4), "{unknown:?}");
    let missing = lgdd(&["build", "1", "2"]);
    assert_eq!(missing.status.code(), Some(4), "{missing:?}");
    let bad_catalog = lgdd(&["catalog", "nope"]);
    assert_eq!(bad_catalog.status.code(), Some(4), "{bad_catalog:?}");
}

#[test]
fn build_reports_record_plan_and_transcript() {
    let report = temp_path("report.json");
    let out = lgdd(&[
        "build",
        "3",
        "1",
        "5",
        "--report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let body: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert!(body["fingerprint"].is_string());
    assert!(body["plan"]["op"].is_string());
    assert!(!body["transcript"].as_array().unwrap().is_empty());
    let _ = std::fs::remove_file(&report);
}
