use std::process::{Command, Output};

use rmlab::io::{read_csv, read_json};
use serde_json::Value;

fn rmlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rmlab")).args(args).env_remove("RMLAB_SEED").output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn degenerate_simulation_to_stdout() {
    let o = rmlab(&["simulate", "--p", "3", "--n", "5", "--mu", "2", "--sigma", "0", "--reps", "2"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("rep,lambda1,lambda2,est1,est2,lambda1_centered,sum_sq_dev"));
    assert_eq!(lines.next(), Some("0,12,0,12,12,0,0"));
    assert_eq!(lines.next(), Some("1,12,0,12,12,0,0"));
    assert_eq!(lines.next(), None);
}

#[test]
fn csv_and_json_carry_identical_values() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("s.csv");
    let json = dir.path().join("s.json");
    let base = ["simulate", "--p", "12", "--n", "20", "--reps", "5", "--seed", "9"];
    let a = rmlab(&[&base[..], &["--out", csv.to_str().unwrap()]].concat());
    let b = rmlab(&[&base[..], &["--out", json.to_str().unwrap(), "--format", "json"]].concat());
    assert_eq!((code(&a), code(&b)), (0, 0));
    let from_csv = read_csv(std::fs::File::open(&csv).unwrap()).unwrap();
    let (params, from_json) = read_json(std::fs::File::open(&json).unwrap()).unwrap();
    assert_eq!(params.p, 12);
    assert_eq!(params.seed, 9);
    assert_eq!(from_csv, from_json);
    assert_eq!(from_csv.len(), 5);
}

#[test]
fn seed_from_environment_and_flag_wins() {
    let run = |env: Option<&str>, extra: &[&str]| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_rmlab"));
        c.args(["simulate", "--p", "4", "--n", "6", "--reps", "2"]).args(extra).env_remove("RMLAB_SEED");
        if let Some(v) = env {
            c.env("RMLAB_SEED", v);
        }
        c.output().unwrap().stdout
    };
    let seven = run(None, &["--seed", "7"]);
    assert_eq!(run(Some("7"), &[]), seven);
    assert_eq!(run(Some("8"), &["--seed", "7"]), seven);
    assert_ne!(run(Some("8"), &[]), seven);
    assert_eq!(run(None, &[]), run(None, &["--seed", "42"]));
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        &["verify-clt", "--p", "0"][..],
        &["verify-clt", "--nonsense"],
        &["verify-clt", "--tol-nonsense", "1"],
        &["error-scaling", "--grid", "64:128"],
        &["bench", "--repeat", "2"],
        &["frobnicate"],
        &[],
    ] {
        let o = rmlab(args);
        assert_eq!(code(&o), 1, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(!o.stderr.is_empty());
    }
    let o = rmlab(&["verify-clt", "--p", "0"]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("--p"));
}

#[test]
fn help_exits_zero() {
    let o = rmlab(&["--help"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("verify-clt"));
}

#[test]
fn failed_verdict_exits_two() {
    let o = rmlab(&["verify-clt", "--p", "8", "--n", "16", "--reps", "20", "--tol-clt-mean", "-1"]);
    assert_eq!(code(&o), 2);
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["checks"][0]["name"], "mean_error");
    assert_eq!(report["checks"][0]["verdict"], "fail");
}

#[test]
fn unwritable_output_exits_three() {
    let o = rmlab(&["simulate", "--p", "2", "--n", "2", "--reps", "1", "--out", "/nonexistent-dir/out.csv"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn degenerate_clt_is_not_applicable() {
    let o = rmlab(&["verify-clt", "--p", "3", "--n", "5", "--mu", "2", "--sigma", "0", "--reps", "4"]);
    assert_eq!(code(&o), 0);
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["standardized_ks"], Value::Null);
    assert_eq!(report["checks"][2]["verdict"], "not_applicable");
}

#[test]
fn aggregate_commands_report_json() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bulk.json");
    let o = rmlab(&["bulk-check", "--p", "16", "--n", "32", "--mu", "0", "--reps", "2", "--out", path.to_str().unwrap()]);
    assert!(matches!(code(&o), 0 | 2));
    let printed: Value = serde_json::from_slice(&o.stdout).unwrap();
    let saved: Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!(printed, saved);
    assert_eq!(printed["pooled_count"], 32);

    let o = rmlab(&["error-scaling", "--grid", "8:16,16:32,32:64", "--reps", "5"]);
    assert!(matches!(code(&o), 0 | 2));
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["grid"].as_array().unwrap().len(), 3);

    let o = rmlab(&["identity-check", "--p", "16", "--n", "24", "--reps", "10"]);
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["chain_violations"], 0);

    let o = rmlab(&["edge-check", "--p", "16", "--n", "32", "--reps", "3"]);
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["replications"], 3);
}

#[test]
fn bench_smoke() {
    let o = rmlab(&["bench", "--p", "2", "--n", "2", "--repeat", "3"]);
    assert_eq!(code(&o), 0);
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(r["t_estimators"].as_f64().unwrap() > 0.0);
    assert!(r["t_full_eigen"].as_f64().unwrap() > 0.0);
}
