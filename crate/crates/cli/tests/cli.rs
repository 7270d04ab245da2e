use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn s2graph(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_s2graph"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok_json(args: &[&str]) -> Value {
    let out = s2graph(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn half_grid(dir: &Path) -> (String, String) {
    let out = s2graph(&["gen", "grid", "--out", path(dir)]);
    assert!(out.status.success());
    (
        path(&dir.join("graph.txt")).to_owned(),
        path(&dir.join("labels.txt")).to_owned(),
    )
}

#[test]
fn analyze_half_grid() {
    let tmp = tempfile::tempdir().unwrap();
    let (g, l) = half_grid(tmp.path());
    let v = ok_json(&["analyze", "--graph", &g, "--labels", &l]);
    assert_eq!(v["cut_size"], 15);
    assert_eq!(v["boundary_size"], 30);
    assert_eq!(v["kappa_star"], 3);
    assert_eq!(v["beta"]["numerator"], 7);
    assert_eq!(v["beta"]["denominator"], 15);
    assert_eq!(v["budget_bound"], 102);
}

#[test]
fn run_with_auto_budget_writes_log() {
    let tmp = tempfile::tempdir().unwrap();
    let (g, l) = half_grid(tmp.path());
    let out = tmp.path().join("run");
    let v = ok_json(&[
        "run",
        "--graph",
        &g,
        "--labels",
        &l,
        "--budget",
        "auto",
        "--seed",
        "5",
        "--out",
        path(&out),
    ]);
    assert_eq!(v["budget"], 102);
    assert_eq!(v["queries_used"], 102);
    assert_eq!(v["raw_queries"], 102);
    let log = fs::read_to_string(out.join("run.log")).unwrap();
    assert_eq!(log.lines().count(), 102);
    assert!(log.starts_with("0 random "));
    let predicted = fs::read_to_string(out.join("predicted.txt")).unwrap();
    assert_eq!(predicted.lines().count(), 225);
    let again = ok_json(&[
        "run", "--graph", &g, "--labels", &l, "--budget", "auto", "--seed", "5",
    ]);
    assert_eq!(again, v);
}

#[test]
fn noisy_run_uses_majority_votes() {
    let tmp = tempfile::tempdir().unwrap();
    let (g, l) = half_grid(tmp.path());
    let v = ok_json(&[
        "run", "--graph", &g, "--labels", &l, "--budget", "40", "--gamma", "0.25",
    ]);
    assert_eq!(v["queries_used"], 40);
    assert_eq!(v["raw_queries"], 40 * 68);
}

#[test]
fn bench_reports_are_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let gen = tmp.path().join("gen");
    assert!(
        s2graph(&["gen", "dithered", "--seed", "1", "--out", path(&gen)])
            .status
            .success()
    );
    let spec = gen.join("spec.json");
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for dir in [&a, &b] {
        let v = ok_json(&[
            "bench",
            "--spec",
            path(&spec),
            "--trials",
            "6",
            "--seed",
            "9",
            "--out",
            path(dir),
        ]);
        assert_eq!(v["trials"], 6);
        assert_eq!(v["recovery_rate"], 1.0);
    }
    let csv = fs::read(a.join("trials.csv")).unwrap();
    assert_eq!(csv, fs::read(b.join("trials.csv")).unwrap());
    assert_eq!(String::from_utf8(csv).unwrap().lines().count(), 7);
    assert_eq!(
        fs::read(a.join("summary.json")).unwrap(),
        fs::read(b.join("summary.json")).unwrap()
    );
}

#[test]
fn count_subcommands() {
    assert_eq!(ok_json(&["count", "grid-cuts", "--r", "3"])["count"], 10);
    let v = ok_json(&[
        "count",
        "chain-family",
        "--r",
        "2",
        "--k",
        "5",
        "--p",
        "3",
        "--m",
        "2",
    ]);
    assert_eq!(v["exact"], 243);
    assert_eq!(v["enumerated"], 243);
}

#[test]
fn ingest_knn_with_classes() {
    let tmp = tempfile::tempdir().unwrap();
    let csv = tmp.path().join("points.csv");
    fs::write(&csv, "x,y,class\n0,0,0\n0,1,0\n1,0,0\n9,9,1\n9,8,1\n").unwrap();
    let out = tmp.path().join("g");
    let status = s2graph(&[
        "ingest",
        path(&csv),
        "--knn",
        "1",
        "--classes",
        "--out",
        path(&out),
    ]);
    assert!(status.status.success());
    let graph = fs::read_to_string(out.join("graph.txt")).unwrap();
    assert!(graph.starts_with("5 "));
    let labels = fs::read_to_string(out.join("labels.txt")).unwrap();
    assert_eq!(labels, "0 -1\n1 -1\n2 -1\n3 +1\n4 +1\n");
}

#[test]
fn nonparam_writes_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("risk.csv");
    let v = ok_json(&[
        "nonparam",
        "--lower",
        "0,0",
        "--upper",
        "0.5,1",
        "--budgets",
        "5000,20000",
        "--trials",
        "2",
        "--out",
        path(&out),
    ]);
    assert_eq!(v["rows"], 4);
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("n,w,trial,"));
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let (g, l) = half_grid(tmp.path());
    assert_eq!(
        s2graph(&["run", "--graph", "/no/such/file", "--labels", &l])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        s2graph(&["run", "--graph", &g, "--labels", &l, "--budget", "1000"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        s2graph(&["run", "--graph", &g, "--labels", &l, "--budget", "none"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        s2graph(&["run", "--graph", &g, "--labels", &l, "--gamma", "0.5"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(
        s2graph(&["count", "chain-family", "--params", "10,4,2,3"])
            .status
            .code(),
        Some(3)
    );
    let bad = tmp.path().join("bad.txt");
    fs::write(&bad, "3 1\n0 0\n").unwrap();
    assert_eq!(
        s2graph(&["run", "--graph", path(&bad), "--labels", &l])
            .status
            .code(),
        Some(2)
    );
}
