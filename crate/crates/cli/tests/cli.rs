use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn cqrate(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cqrate")).args(args).output().expect("run cqrate")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

#[test]
fn analyze_src_a() {
    let out = cqrate(&["analyze", "--source", &data("src_a.json")]);
    assert!(out.status.success());
    let doc = json(&out);
    assert_eq!(doc["profile"]["s_b"].as_f64().unwrap(), 1.0);
    assert_eq!(doc["genericity"]["is_generic"], false);
    assert_eq!(doc["dw_point"]["rX"].as_f64().unwrap(), 0.0);
    assert_eq!(doc["dw_point"]["rB"].as_f64().unwrap(), 1.0);
    assert_eq!(doc["provenance"]["tool"], "cqrate");
    assert!(doc.get("collapse").is_none());
}

#[test]
fn analyze_mixed_input_and_csv() {
    let out = cqrate(&["analyze", "--source", &data("mixed_qubit.json"), "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("quantity,value\n"));
    assert!(text.contains("\ngeneric,1\n"));
}

#[test]
fn missing_source_is_input_error() {
    let out = cqrate(&["analyze", "--source", "/nonexistent/source.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not found"));
}

#[test]
fn malformed_source_is_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"probs":[0.6,0.6],"states":[]}"#).unwrap();
    let out = cqrate(&["analyze", "--source", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_identity_code_passes() {
    let out = cqrate(&["verify-code", "--source", &data("src_b.json"), "--code", &data("code_identity_n1.json")]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["fidelity"]["epsilon"].as_f64().unwrap(), 0.0);
    assert_eq!(doc["decoupling"]["cmi"].as_f64().unwrap(), 0.0);
    assert_eq!(doc["pass"], true);
}

#[test]
fn verify_truncation_reports_slack() {
    let out = cqrate(&["verify-code", "--source", &data("src_b.json"), "--code", &data("code_truncation_n2.json")]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert!(doc["decoupling"]["slack"].as_f64().unwrap() > 0.0);
    assert!((doc["fidelity"]["avgFidelity"].as_f64().unwrap() - 0.75).abs() < 1e-12);
}

#[test]
fn verify_cap_exit_code() {
    let out = cqrate(&["verify-code", "--source", &data("src_b.json"), "--code", &data("code_identity_n3.json")]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn verify_writes_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.csv");
    let out = cqrate(&[
        "verify-code",
        "--source",
        &data("src_a.json"),
        "--code",
        &data("code_identity_n1.json"),
        "--format",
        "csv",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(path).unwrap();
    assert!(text.starts_with("n,avg_fidelity,epsilon,cmi,bound,pass\n1,1,0,0,"));
}

#[test]
fn empty_or_bad_delta_grid_is_usage_error() {
    for grid in ["", "0.1,0.05", "-1"] {
        let out = cqrate(&["idelta", "--source", &data("src_a.json"), "--delta-grid", grid]);
        assert_eq!(out.status.code(), Some(2), "grid `{grid}`");
    }
}

#[test]
fn idelta_on_orthogonal_source_is_flat() {
    let out = cqrate(&[
        "idelta",
        "--source",
        &data("src_a.json"),
        "--delta-grid",
        "0,0.5",
        "--restarts",
        "4",
        "--format",
        "csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("delta,raw,lower_bound"));
    for line in lines {
        let lb: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!((lb - 1.0).abs() < 0.02, "{line}");
    }
}

#[test]
fn region_reuses_idelta_output_and_adds_sum_plane() {
    let dir = tempfile::tempdir().unwrap();
    let curve = dir.path().join("curve.json");
    let out = cqrate(&[
        "idelta",
        "--source",
        &data("src_a.json"),
        "--delta-grid",
        "0",
        "--restarts",
        "4",
        "--out",
        curve.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let out = cqrate(&[
        "region",
        "--source",
        &data("src_a.json"),
        "--idelta",
        curve.to_str().unwrap(),
        "--mode",
        "unassisted",
    ]);
    assert!(out.status.success());
    let doc = json(&out);
    let outer = doc["regions"]["outer"]["halfplanes"].as_array().unwrap();
    assert_eq!(outer.len(), 4);
    assert!(outer.iter().any(|h| h["aX"] == 1.0 && h["aB"] == 1.0));
    assert_eq!(doc["regions"]["inner"]["boundary_samples"].as_array().unwrap().len(), 200);

    let csv = cqrate(&["region", "--source", &data("src_a.json"), "--idelta", curve.to_str().unwrap(), "--format", "csv"]);
    let text = String::from_utf8(csv.stdout).unwrap();
    assert!(text.starts_with("rX,rB,region_kind\n"));
    assert_eq!(text.lines().count(), 1 + 400);
}

#[test]
fn selftest_single_suite() {
    let out = cqrate(&["selftest", "--suite", "fvdg"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("fvdg"));
    assert_eq!(text.lines().count(), 2);
    let bad = cqrate(&["selftest", "--suite", "nope"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn invalid_thread_count_is_input_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_cqrate"))
        .args(["selftest", "--suite", "ssa"])
        .env("CQRATE_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
