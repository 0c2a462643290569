//! End-to-end tests of the `rmx` binary: document structure, exit codes,
//! determinism of the on-disk format, and the shape of check/scan output.

use std::path::PathBuf;
use std::process::{Command, Output};

use rmx_cli::document::MatrixDocument;

fn rmx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rmx"))
        .args(args)
        .env_remove("RMX_DEFAULT_TOL")
        .output()
        .expect("failed to launch rmx")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is utf-8")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr is utf-8")
}

fn scratch_path(tag: &str) -> PathBuf {
    std::env::temp_dir().join(format!("rmx-cli-test-{}-{tag}", std::process::id()))
}

#[test]
fn eval_sbar_emits_a_charge_conserving_document() {
    let out = rmx(&[
        "eval", "--kind", "sbar", "--n", "2", "--z", "0.17+0.06i", "--w", "0.31+0.21i", "--tau",
        "0.3+1.7i",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_of(&out));
    let doc = MatrixDocument::from_json_str(&stdout_of(&out)).expect("stdout parses");
    assert_eq!(doc.kind, "sbar");
    assert_eq!(doc.n, 2);
    assert_eq!(doc.matrix.nrows(), 4);
    assert_eq!(doc.charge_conserving, Some(true));
    assert_eq!(doc.regularized, Some(false));
    let nonzero = doc.matrix.iter().filter(|e| e.norm() > 1e-10).count();
    assert_eq!(nonzero, 8, "n = 2 bare matrix fills exactly the 8 allowed slots");
    assert!(stderr_of(&out).contains("nonzero=8"));
}

#[test]
fn eval_r_q_without_kappa_matches_six_vertex_shape() {
    let out = rmx(&[
        "eval", "--kind", "r_q", "--n", "2", "--beta", "0.37", "--xi", "1.7", "--no-kappa",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_of(&out));
    let doc = MatrixDocument::from_json_str(&stdout_of(&out)).expect("stdout parses");
    let nonzero = doc.matrix.iter().filter(|e| e.norm() > 1e-10).count();
    assert_eq!(nonzero, 6, "six-vertex texture has 6 nonzero entries");
    assert_eq!(doc.params["include_kappa"], serde_json::json!(false));
    // corner entries are exactly 1 without the scalar factor
    assert!((doc.matrix[[0, 0]].re - 1.0).abs() < 1e-15);
    assert!((doc.matrix[[3, 3]].re - 1.0).abs() < 1e-15);
}

#[test]
fn eval_twist_f_has_no_charge_flags() {
    let out = rmx(&["eval", "--kind", "twist_f", "--n", "3"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_of(&out));
    let doc = MatrixDocument::from_json_str(&stdout_of(&out)).expect("stdout parses");
    assert_eq!(doc.matrix.nrows(), 9);
    assert_eq!(doc.charge_conserving, None);
    assert_eq!(doc.regularized, None);
}

#[test]
fn real_w_is_fine_for_sbar_but_rejected_for_s_full() {
    let ok = rmx(&[
        "eval", "--kind", "sbar", "--n", "2", "--z", "0.1", "--w", "0.3", "--tau", "1.9i",
    ]);
    assert_eq!(ok.status.code(), Some(0), "stderr: {}", stderr_of(&ok));
    let bad = rmx(&[
        "eval", "--kind", "s_full", "--n", "2", "--v", "0.1", "--w", "0.3", "--tau", "1.9i",
        "--xi", "1.5",
    ]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(stderr_of(&bad).contains("error:"));
}

#[test]
fn eval_missing_required_parameter_exits_2() {
    let out = rmx(&[
        "eval", "--kind", "sbar", "--n", "2", "--w", "0.31+0.21i", "--tau", "0.3+1.7i",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("--z"));
}

#[test]
fn eval_documents_are_bitwise_reproducible_and_round_trip() {
    let args = [
        "eval", "--kind", "s_full", "--n", "2", "--v", "0.2", "--w", "0.4i", "--tau", "2i",
        "--xi", "1.5", "--seed", "11",
    ];
    let first = rmx(&args);
    let second = rmx(&args);
    assert_eq!(first.status.code(), Some(0), "stderr: {}", stderr_of(&first));
    assert_eq!(
        stdout_of(&first),
        stdout_of(&second),
        "same invocation must produce identical bytes"
    );
    let text = stdout_of(&first);
    let doc = MatrixDocument::from_json_str(&text).expect("stdout parses");
    assert_eq!(doc.seed, Some(11));
    assert_eq!(
        doc.to_json_string(),
        text,
        "reader -> writer must reproduce the document bytes"
    );
}

#[test]
fn eval_writes_to_output_file() {
    let path = scratch_path("eval-out.json");
    let out = rmx(&[
        "eval", "--kind", "r_dy", "--n", "3", "--beta", "0.3", "--xi", "1.5", "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_of(&out));
    assert!(stdout_of(&out).is_empty(), "document goes to the file, not stdout");
    let text = std::fs::read_to_string(&path).expect("output file exists");
    let doc = MatrixDocument::from_json_str(&text).expect("file parses");
    assert_eq!(doc.kind, "r_dy");
    assert_eq!(doc.matrix.nrows(), 9);
    std::fs::remove_file(&path).ok();
}

#[test]
fn default_tolerance_env_is_honored_and_validated() {
    let bad = Command::new(env!("CARGO_BIN_EXE_rmx"))
        .args(["eval", "--kind", "twist_f", "--n", "2"])
        .env("RMX_DEFAULT_TOL", "not-a-number")
        .output()
        .expect("failed to launch rmx");
    assert_eq!(bad.status.code(), Some(2));
    let good = Command::new(env!("CARGO_BIN_EXE_rmx"))
        .args(["eval", "--kind", "twist_f", "--n", "2"])
        .env("RMX_DEFAULT_TOL", "1e-10")
        .output()
        .expect("failed to launch rmx");
    assert_eq!(good.status.code(), Some(0));
    let doc = MatrixDocument::from_json_str(&String::from_utf8(good.stdout).unwrap()).unwrap();
    assert_eq!(doc.truncation.tol, 1e-10);
}

#[test]
fn check_reports_pass_lines_and_writes_jsonl() {
    let path = scratch_path("mt2-reports.jsonl");
    let out = rmx(&[
        "check", "--suite", "mt2", "--n", "2", "--seed", "5", "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "stdout: {}", stdout_of(&out));
    let text = stdout_of(&out);
    assert_eq!(text.matches("PASS mt2[").count(), 30);
    assert!(text.contains("PASSED: 30/30 checks passed"));
    let jsonl = std::fs::read_to_string(&path).expect("jsonl file exists");
    let lines: Vec<&str> = jsonl.lines().collect();
    assert_eq!(lines.len(), 30);
    let first: serde_json::Value = serde_json::from_str(lines[0]).expect("line parses");
    assert_eq!(first["check_name"], "mt2[0]");
    assert_eq!(first["passed"], serde_json::json!(true));
    assert_eq!(first["seed"], serde_json::json!(5));
    std::fs::remove_file(&path).ok();
}

#[test]
fn check_with_impossible_tolerance_fails_with_exit_1() {
    let out = rmx(&[
        "check", "--suite", "ybe", "--n", "2", "--seed", "3", "--tol", "ybe=1e-15",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout_of(&out);
    assert!(text.contains("FAIL "), "at least one check must fail at 1e-15");
    assert!(text.contains("FAILED:"));
}

#[test]
fn check_rejects_unknown_suites_and_bad_overrides() {
    let unknown = rmx(&["check", "--suite", "nope", "--n", "2"]);
    assert_eq!(unknown.status.code(), Some(2));
    let bad_override = rmx(&["check", "--suite", "mt2", "--n", "2", "--tol", "nope=1"]);
    assert_eq!(bad_override.status.code(), Some(2));
}

#[test]
fn goldens_suite_requires_n2_at_exit_level() {
    let out = rmx(&["check", "--suite", "goldens", "--n", "5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("n = 2"));
}

#[test]
fn scan_emits_decreasing_csv_and_validates_steps() {
    let out = rmx(&["scan", "--path", "ordinary", "--n", "2", "--steps", "3"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_of(&out));
    let text = stdout_of(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[0], "step,point_re,point_im,distance,normalized_distance");
    let distances: Vec<f64> = lines[1..]
        .iter()
        .map(|l| l.split(',').nth(3).unwrap().parse().unwrap())
        .collect();
    assert!(distances[1] < distances[0] && distances[2] < distances[1]);

    let too_short = rmx(&["scan", "--path", "scaling", "--n", "2", "--steps", "1"]);
    assert_eq!(too_short.status.code(), Some(2));
    let unknown = rmx(&["scan", "--path", "diagonal", "--n", "2"]);
    assert_eq!(unknown.status.code(), Some(2));
}
