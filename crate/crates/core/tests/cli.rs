use std::fs;
use std::process::{Command, Output};

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cesaro-lab")).args(args).output().expect("binary runs")
}

#[test]
fn sample_cesaro_is_byte_identical_across_runs() {
    let args = ["sample-cesaro", "--lambda", "1", "--length", "100", "--count", "2", "--seed", "1"];
    let a = cli(&args);
    let b = cli(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.starts_with("sample_id,step,coord,x\n"));
    assert_eq!(text.lines().count(), 1 + 2 * 100);
}

#[test]
fn worker_count_does_not_change_output() {
    let base = ["sample-gt", "--lambdas", "1,3", "--depth", "20", "--count", "50", "--seed", "4"];
    let one = cli(&[&base[..], &["--workers", "1"]].concat());
    let four = cli(&[&base[..], &["--workers", "4"]].concat());
    assert!(one.status.success());
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn equal_frequencies_for_gt_exit_with_usage_error() {
    let out = cli(&["sample-gt", "--lambdas", "1,1", "--cone", "gt", "--depth", "10"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.starts_with("error:"), "{err}");
    assert_eq!(err.trim_end().lines().count(), 1);
}

#[test]
fn unknown_flag_is_a_usage_error() {
    assert_eq!(cli(&["sample-simplex", "--bogus"]).status.code(), Some(2));
}

#[test]
fn verify_thoma_succeeds() {
    let out = cli(&["verify-thoma", "--p", "0.7,0.3", "--max-size", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("lambda, schur, per_path_prob, abs_error\n"));
    assert!(text.contains("(2,1), "));
}

#[test]
fn verify_discrete_suite_passes() {
    let out = cli(&["verify", "--suite", "discrete"]);
    assert_eq!(out.status.code(), Some(0));
    for line in String::from_utf8(out.stdout).unwrap().lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["passed"], true);
        assert_eq!(v["seed"], 7);
    }
}

#[test]
fn sample_gt_writes_paths_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("gt.csv");
    let out = cli(&["sample-gt", "--lambdas", "1,3", "--depth", "5", "--count", "3", "--out", csv.to_str().unwrap()]);
    assert!(out.status.success());
    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("path_id,level,x1,x2\n"));
    let sidecar: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("gt.csv.json")).unwrap()).unwrap();
    assert_eq!(sidecar["accepted"], 3);
    assert!(sidecar["acceptance_rate"].as_f64().unwrap() > 0.0);
}

#[test]
fn wishart_path_emits_gram_lines() {
    let out = cli(&["sample-wishart-path", "--lambdas", "1,3", "--n-max", "6", "--count", "2", "--emit-gram"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let grams: Vec<serde_json::Value> =
        text.lines().filter(|l| l.starts_with('{')).map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(grams.len(), 2);
    assert_eq!(grams[1]["level"], 6);
    assert_eq!(text.lines().filter(|l| l.starts_with("0,")).count(), 5);
}
