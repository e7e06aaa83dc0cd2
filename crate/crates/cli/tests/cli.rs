use std::fs;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mvi-bench"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn bench_writes_outputs_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = run(&["bench", "--example", "41", "--eps-list", "1e-1,1e-2", "--out", out]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let summary = fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    assert!(summary.starts_with("epsilon,iterations,seconds,final_residual,status\n"));
    assert_eq!(summary.lines().count(), 3);
    assert!(summary.lines().skip(1).all(|l| l.ends_with(",converged")));
    assert!(dir.path().join("trace_1e-1.csv").exists());
    assert!(dir.path().join("trace_1e-2.csv").exists());
    // The default parameters sit above the inertia bound.
    assert!(String::from_utf8_lossy(&o.stderr).contains("exceeds bound"));
}

#[test]
fn empty_or_bad_tolerance_lists_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    for list in ["", "1e-2,1e-1", "abc", "-1e-3"] {
        let o = run(&["bench", "--example", "42", "--eps-list", list, "--out", out]);
        assert_eq!(o.status.code(), Some(2), "eps list {list:?}");
    }
    assert!(!dir.path().join("summary.csv").exists());
}

#[test]
fn max_iteration_exhaustion_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(
        &cfg,
        "problem = \"example42\"\ntolerances = [1e-7]\nmax_iters = 5\noutput = \"out\"\n",
    )
    .unwrap();
    let o = run(&["solve", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let summary = fs::read_to_string(dir.path().join("out/summary.csv")).unwrap();
    assert!(summary.contains(",max_iters"));
}

#[test]
fn solve_rejects_bad_configs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "problem = \"example41\"\ntolerances = []\n").unwrap();
    assert_eq!(run(&["solve", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    let missing = dir.path().join("missing.toml");
    assert_eq!(run(&["solve", "--config", missing.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn verify_reports_pass_and_fail() {
    let o = run(&["verify", "--example", "42", "--point", "-10,5,3,3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("pass"));

    let o = run(&["verify", "--example", "41", "--point", "1,1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("fail"));

    // Outside the feasible set, or the wrong dimension.
    assert_eq!(run(&["verify", "--example", "42", "--point", "-10,11,0,0"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--example", "41", "--point", "0,0,0"]).status.code(), Some(2));
}
