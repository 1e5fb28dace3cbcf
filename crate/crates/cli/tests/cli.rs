use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn cop(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cop")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn json_stdout(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

const MIXED_PLUS: &str = r#"{"dim": 2, "matrix": [[[0.5, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.5, 0.0]]]}"#;
const DIAG: &str = r#"{"dim": 3, "matrix": [[[0.2, 0], [0, 0], [0, 0]], [[0, 0], [0.3, 0], [0, 0]], [[0, 0], [0, 0], [0.5, 0]]]}"#;
const BELL: &str = r#"{"dim": 4, "factor_dims": [2, 2],
    "vector": [[0.7071067811865476, 0], [0, 0], [0, 0], [0.7071067811865476, 0]]}"#;

#[test]
fn compute_maximally_mixed_qubit() {
    let dir = tempfile::tempdir().unwrap();
    let state = write(dir.path(), "mixed_plus.json", MIXED_PLUS);
    let v = json_stdout(&cop(&["compute", "--state", state.to_str().unwrap()]));
    assert_eq!(v["value"].as_f64().unwrap(), 1.0);
    assert_eq!(v["definition"], "fixed_basis");
    assert_eq!(v["ancilla_dim"], 2);
    assert_eq!(v["optimizer"]["restarts"], 16);
    assert!(v["optimizer"]["converged"].as_bool().unwrap());
}

#[test]
fn compute_adapted_and_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let state = write(dir.path(), "diag.json", DIAG);
    let s = state.to_str().unwrap();
    let h = -(0.2f64 * 0.2f64.log2() + 0.3 * 0.3f64.log2() + 0.5 * 0.5f64.log2());
    let adapted = json_stdout(&cop(&["compute", "--state", s, "--adapted"]));
    assert_eq!(adapted["definition"], "adapted");
    assert!((adapted["value"].as_f64().unwrap() - h).abs() < 1e-10);
    let swept = json_stdout(&cop(&["compute", "--state", s, "--sweep-ancilla", "--restarts", "2"]));
    assert!((swept["value"].as_f64().unwrap() - h).abs() < 1e-6);
    assert!(!swept["per_ancilla_dim"].as_array().unwrap().is_empty());
}

#[test]
fn residual_of_diagonal_state_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let state = write(dir.path(), "diag.json", DIAG);
    let v = json_stdout(&cop(&["residual", "--state", state.to_str().unwrap()]));
    assert!(v["value"].as_f64().unwrap().abs() < 1e-9);
}

#[test]
fn eop_of_bell_state() {
    let dir = tempfile::tempdir().unwrap();
    let state = write(dir.path(), "bell.json", BELL);
    let v = json_stdout(&cop(&["eop", "--state", state.to_str().unwrap(), "--split", "1x1"]));
    assert!((v["eop"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert!((v["cop"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert!(v["gap"].as_f64().unwrap().abs() < 1e-9);
}

#[test]
fn oracle_agrees_with_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let state = write(dir.path(), "mixed_plus.json", MIXED_PLUS);
    let v = json_stdout(&cop(&["oracle", "--state", state.to_str().unwrap(), "--samples", "2000"]));
    assert_eq!(v["value"].as_f64().unwrap(), 1.0);
}

#[test]
fn aosd_default_sweep_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig1.csv");
    let o = cop(&["aosd", "--alpha-grid", "0:1:21", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let mut reader = csv::Reader::from_path(&out).unwrap();
    assert_eq!(reader.headers().unwrap(), vec!["alpha", "ps", "concurrence", "cop", "cop_dephased"]);
    let rows: Vec<Vec<f64>> = reader
        .records()
        .map(|r| r.unwrap().iter().map(|f| f.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 21);
    let (first, last) = (&rows[0], &rows[20]);
    assert_eq!((first[1], first[3]), (1.0, 1.0));
    assert_eq!((last[1], last[3]), (0.0, 0.0));
}

#[test]
fn identical_invocations_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let args = ["aosd", "--alpha-grid", "0:1:6", "--random-phases", "--seed", "11", "--out"];
        let o = cop(&[&args[..], &[out.to_str().unwrap()]].concat());
        assert!(o.status.success());
        std::fs::read(out).unwrap()
    };
    assert_eq!(run("a.csv"), run("b.csv"));

    let verify = |name: &str| {
        let out = dir.path().join(name);
        let o = cop(&["verify", "--props", "P1,QR", "--n", "4", "--dims", "2,3", "--seed", "7", "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        std::fs::read(out).unwrap()
    };
    assert_eq!(verify("a.json"), verify("b.json"));
}

#[test]
fn thread_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let state = write(dir.path(), "diag.json", DIAG);
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_cop"))
            .env("COP_THREADS", threads)
            .args(["compute", "--state", state.to_str().unwrap(), "--restarts", "6"])
            .output()
            .unwrap()
    };
    let (one, three) = (run("1"), run("3"));
    assert!(one.status.success());
    assert_eq!(one.stdout, three.stdout);
    assert_eq!(run("0").status.code(), Some(2));
}

#[test]
fn verify_report_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let ok = cop(&["verify", "--props", "P1,P2", "--n", "5", "--dims", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(ok.status.code(), Some(0));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["reports"].as_array().unwrap().len(), 2);
    assert_eq!(report["reports"][0]["prop"], "P1");
    assert_eq!(report["reports"][0]["n_pass"], 5);
    assert!(report["witnesses_exhibited"].as_bool().unwrap());

    // Genuinely incoherent channels raise the fixed-basis value on many
    // random qubit states, so this run must report failures.
    let bad = cop(&["verify", "--props", "P3", "--n", "20", "--dims", "2", "--restarts", "4"]);
    assert_eq!(bad.status.code(), Some(1));
    let report: Value = serde_json::from_slice(&bad.stdout).unwrap();
    let fails = report["reports"][0]["failing_seeds"].as_array().unwrap();
    assert!(!fails.is_empty());
    assert!(fails[0]["seed"].is_u64() && fails[0]["cause"].is_string());
}

#[test]
fn usage_and_validation_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(
        dir.path(),
        "bad.json",
        r#"{"dim": 2, "matrix": [[[0.5, 0.0], [0.0]], [[0.0, 0.0], [0.5, 0.0]]]}"#,
    );
    let o = cop(&["compute", "--state", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("matrix[0][1]"));

    let not_psd = write(
        dir.path(),
        "neg.json",
        r#"{"dim": 2, "matrix": [[[1.5, 0.0], [0.0, 0.0]], [[0.0, 0.0], [-0.5, 0.0]]]}"#,
    );
    let o = cop(&["compute", "--state", not_psd.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("`matrix`"));

    assert_eq!(cop(&["compute", "--bogus"]).status.code(), Some(2));
    assert_eq!(cop(&["compute"]).status.code(), Some(2));
    assert_eq!(cop(&["compute", "--state", "/nonexistent.json"]).status.code(), Some(2));
    assert_eq!(cop(&["aosd", "--condition", "constant", "--alpha-grid", "0:1:3"]).status.code(), Some(2));
    assert_eq!(cop(&["verify", "--props", "P9"]).status.code(), Some(2));
    assert_eq!(cop(&["eop", "--state", bad.to_str().unwrap(), "--split", "2by2"]).status.code(), Some(2));
}
