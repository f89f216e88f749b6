use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn qcompose(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcompose"))
        .args(args)
        .output()
        .expect("spawn qcompose")
}

fn stdout(args: &[&str]) -> String {
    let out = qcompose(args);
    assert!(
        out.status.success(),
        "qcompose {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json_rows(args: &[&str]) -> Vec<Value> {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    match serde_json::from_str(&stdout(&all)).unwrap() {
        Value::Array(rows) => rows,
        other => panic!("expected array, got {other}"),
    }
}

fn write(dir: &Path, name: &str, contents: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p.to_str().unwrap().to_string()
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

#[test]
fn dj_small_dimensions() {
    for m in ["2", "4", "16"] {
        let rows = json_rows(&["dj", "--m", m]);
        assert_eq!(rows[0]["kind"], "constant");
        assert_eq!(num(&rows[0]["accept_probability"]), 1.0);
        assert!(rows.len() > 1);
        for r in &rows[1..] {
            assert_eq!(r["kind"], "balanced");
            assert!(num(&r["accept_probability"]) <= 1e-12);
        }
    }
}

#[test]
fn dj_rejects_non_power_of_two() {
    let out = qcompose(&["dj", "--m", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert_eq!(String::from_utf8_lossy(&out.stderr).lines().count(), 1);
    assert_eq!(qcompose(&["dj", "--m", "32768"]).status.code(), Some(2));
}

#[test]
fn compose_fail_counterexample() {
    let rows = json_rows(&["compose-fail", "--m", "4"]);
    let stops: Vec<&str> = rows
        .iter()
        .map(|r| r["stop_time"].as_str().unwrap())
        .collect();
    assert_eq!(stops, ["1", "2", "3", "FULL"]);
    let expect = ((1.0 - 0.5f64.sqrt()) / 4.0).powi(2);
    assert!((num(&rows[0]["accept_probability"]) - expect).abs() < 1e-12);
    assert!(num(&rows.last().unwrap()["accept_probability"]) <= 1e-12);
    let mass: Vec<f64> = rows.iter().map(|r| num(&r["exited_mass"])).collect();
    assert!(mass.windows(2).all(|w| w[0] <= w[1]), "{mass:?}");
}

#[test]
fn compose_fail_reads_instance_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(
        dir.path(),
        "inst.json",
        r#"{"m":4,"blocks":["0e","f0","0c","e0"]}"#,
    );
    let from_file = stdout(&["compose-fail", "--instance", &path]);
    assert_eq!(from_file, stdout(&["compose-fail", "--m", "4"]));
    assert_eq!(
        qcompose(&["compose-fail", "--m", "6"]).status.code(),
        Some(2)
    );
}

#[test]
fn purifier_columns() {
    let rows = json_rows(&[
        "purifier",
        "--epsilon",
        "1/3",
        "--d-list",
        "4,8,16,32",
        "--p0-list",
        "0.1,0.9",
    ]);
    assert_eq!(rows.len(), 8);
    for r in &rows {
        let d = r["d"].as_i64().unwrap() as i32;
        let want = 2f64.powi(-d);
        assert!((num(&r["perturbation_bound"]) - want).abs() <= 1e-11 * want);
        assert!(num(&r["complexity"]) <= 2.0);
        let accept = r["accept"].as_bool().unwrap();
        assert_eq!(accept, num(&r["p0"]) < 0.5);
    }
}

#[test]
fn purifier_rejects_off_promise() {
    let out = qcompose(&["purifier", "--p0", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn commute_two_edge_path() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.json", r#"{"n":3,"edges":[[0,1,1],[1,2,1]]}"#);
    let rows = json_rows(&["commute", "--graph", &g, "--trials", "20000"]);
    let r = &rows[0];
    assert!((num(&r["h_st"]) - 4.0).abs() < 1e-9);
    assert!((num(&r["h_ts"]) - 4.0).abs() < 1e-9);
    assert!((num(&r["two_w_r"]) - 8.0).abs() < 1e-9);
    assert!(num(&r["residual"]) <= 1e-9);
    for (mean, se) in [("mc_h_st", "mc_h_st_stderr"), ("mc_h_ts", "mc_h_ts_stderr")] {
        assert!((num(&r[mean]) - 4.0).abs() <= 4.0 * num(&r[se]));
    }
}

#[test]
fn commute_errors() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", "{\"n\": 3, \"edges\": [");
    assert_eq!(
        qcompose(&["commute", "--graph", &bad]).status.code(),
        Some(3)
    );

    let boundary = write(
        dir.path(),
        "b.json",
        r#"{"n":2,"edges":[[0,1,1]],"boundary":{"0":1.0}}"#,
    );
    assert_eq!(
        qcompose(&["commute", "--graph", &boundary]).status.code(),
        Some(2)
    );

    let split = write(dir.path(), "s.json", r#"{"n":4,"edges":[[0,1,1],[2,3,1]]}"#);
    assert_eq!(
        qcompose(&["commute", "--graph", &split]).status.code(),
        Some(2)
    );

    let missing = dir.path().join("nope.json");
    assert_eq!(
        qcompose(&["commute", "--graph", missing.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn costs_example() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(
        dir.path(),
        "p.json",
        r#"{"Q":2,"subroutine_times":[1,100],"L":0,"weights":[[0.5,0.5],[0.5,0.5]]}"#,
    );
    let csv = stdout(&["costs", "--profile", &p]);
    let costs: Vec<&str> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap())
        .collect();
    assert_eq!(costs, ["101", "200", "101"]);

    let bad_rows = write(
        dir.path(),
        "q.json",
        r#"{"Q":1,"subroutine_times":[1,2],"L":0,"weights":[[0.5,0.6]]}"#,
    );
    assert_eq!(
        qcompose(&["costs", "--profile", &bad_rows]).status.code(),
        Some(2)
    );
}

#[test]
fn majority_vs_purifier_table() {
    let rows = json_rows(&[
        "majority-vs-purifier",
        "--epsilon",
        "1/3",
        "--deltas",
        "1/8,2^-10,2^-20",
    ]);
    let k: Vec<i64> = rows
        .iter()
        .map(|r| r["majority_k"].as_i64().unwrap())
        .collect();
    assert!(k.windows(2).all(|w| w[0] < w[1]), "{k:?}");
    assert!(rows.iter().all(|r| num(&r["purifier_overhead"]) <= 2.0));
}

#[test]
fn majority_vs_purifier_needs_deltas() {
    assert_eq!(
        qcompose(&["majority-vs-purifier", "--deltas", ""])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(qcompose(&["majority-vs-purifier"]).status.code(), Some(2));
}

#[test]
fn output_file_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(
        dir.path(),
        "g.json",
        r#"{"n":4,"edges":[[0,1,0.5],[1,2,2],[2,3,1],[0,3,3]]}"#,
    );
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for out in [&a, &b] {
        let args = [
            "commute", "--graph", &g, "--trials", "5000", "--seed", "7", "--out",
        ];
        let mut all = args.to_vec();
        all.push(out.to_str().unwrap());
        assert!(qcompose(&all).status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let dj = |out: &Path| {
        let o = qcompose(&[
            "dj",
            "--m",
            "64",
            "--seed",
            "3",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success());
        std::fs::read(out).unwrap()
    };
    assert_eq!(dj(&a), dj(&b));
}

#[test]
fn failed_run_leaves_no_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.csv");
    let o = qcompose(&["dj", "--m", "3", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn csv_and_json_carry_the_same_numbers() {
    let csv = stdout(&["purifier", "--d-list", "4,16"]);
    let json = json_rows(&["purifier", "--d-list", "4,16"]);
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    for (line, row) in lines.zip(&json) {
        for (name, cell) in header.iter().zip(line.split(',')) {
            let v = &row[*name];
            let text = match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            assert_eq!(text, cell, "column {name}");
        }
    }
}
