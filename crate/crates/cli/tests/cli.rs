use std::path::Path;
use std::process::{Command, Output};

use bfcal_cli::report::parse_table_csv;

fn bfcal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bfcal"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

#[test]
fn mustar_reports_shortcut_value() {
    let out = bfcal(&["mustar"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("mu_star,theta_star,strategy,boundary_distance,evaluations")
    );
    let fields: Vec<&str> = lines.next().unwrap().split(',').collect();
    let mu: f64 = fields[0].parse().unwrap();
    assert!((mu - 1.803941892768689).abs() < 1e-8, "{mu}");
    assert_eq!(fields[2], "monotone_shortcut");
}

#[test]
fn mustar_bounded_search_from_flag() {
    let out = bfcal(&["mustar", "--strategy", "bounded_search", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["strategy"], "bounded_search");
    assert!((doc["mu_star"].as_f64().unwrap() - 1.803941892768689).abs() < 1e-6);
}

#[test]
fn table_quadrature_matches_reference() {
    let out = bfcal(&["table", "--method", "quadrature", "--theta", "-1", "--theta", "-0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = parse_table_csv(&stdout(&out)).unwrap();
    assert_eq!(rows.len(), 2);
    assert!((rows[0].mean - 0.8124290944739561).abs() < 1e-8);
    assert!((rows[1].mean - 1.1224705598423765).abs() < 1e-8);
}

#[test]
fn table_output_is_reproducible_and_seed_sensitive() {
    let args = ["table", "--theta", "-0.5", "--reps", "5000", "--seed", "7"];
    let a = bfcal(&args);
    let b = bfcal(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = bfcal(&["table", "--theta", "-0.5", "--reps", "5000", "--seed", "8"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn out_flag_writes_file_and_prints_summary() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("mu.json");
    let out = bfcal(&["mustar", "--format", "json", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("1.804"), "{}", stdout(&out));
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(doc["mu_star"].is_number());
}

#[test]
fn config_file_is_honoured_and_flags_override_it() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    std::fs::write(
        &path,
        "table.thetas = [-2.0]\ntable.method = \"quadrature\"\noutput.format = \"json\"\n",
    )
    .unwrap();
    let out = bfcal(&["table", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["rows"].as_array().unwrap().len(), 1);
    let out = bfcal(&["table", "--config", path.to_str().unwrap(), "--format", "csv"]);
    assert!(stdout(&out).starts_with("theta,mean"));
}

#[test]
fn invalid_alpha_is_a_config_error() {
    let out = bfcal(&["eprocess", "--alpha", "1.5"]);
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "config");
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "mc.reps = 10\n").unwrap();
    let out = bfcal(&["mustar", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_config_file_is_reported() {
    let out = bfcal(&["mustar", "--config", "/nonexistent/run.toml"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!Path::new("/nonexistent/run.toml").exists());
}

#[test]
fn eval_outside_support_fails() {
    for s in ["1.5", "-0.1"] {
        let out = bfcal(&["eval", "--s", s]);
        assert_ne!(out.status.code(), Some(0));
        assert!(out.stdout.is_empty());
    }
}

#[test]
fn eval_at_half_is_neutral() {
    let out = bfcal(&["eval", "--s", "0.5", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!((doc["bf"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    let e = doc["e_value"].as_f64().unwrap();
    assert!((e - 1.0 / 1.803941892768689).abs() < 1e-8);
}

#[test]
fn validate_exit_code_tracks_verdict() {
    let ok = bfcal(&["validate", "--theta", "0", "--theta", "-1", "--reps", "20000"]);
    assert_eq!(ok.status.code(), Some(0), "{}", stdout(&ok));
    let bad = bfcal(&["validate", "--theta", "0", "--reps", "20000", "--mu-star", "1"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stdout(&bad).contains("false"));
}

#[test]
fn validate_rejects_positive_theta() {
    let out = bfcal(&["validate", "--theta", "0.5", "--reps", "1000"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn eprocess_small_run() {
    let out = bfcal(&["eprocess", "--steps", "10", "--trajectories", "500", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let freq = doc["rejection_frequency"].as_f64().unwrap();
    assert!((0.0..=0.2).contains(&freq));
}

#[test]
fn eprocess_under_alternative_rejects_often() {
    let out = bfcal(&[
        "eprocess",
        "--theta",
        "2",
        "--steps",
        "30",
        "--trajectories",
        "300",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(doc["rejection_frequency"].as_f64().unwrap() > 0.5);
}

#[test]
fn bad_subcommand_usage_is_nonzero() {
    assert_ne!(bfcal(&["frobnicate"]).status.code(), Some(0));
    assert_ne!(bfcal(&["eval"]).status.code(), Some(0));
}
