use std::path::Path;
use std::process::{Command, Output};

fn linfqmc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_linfqmc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    r.records()
        .map(|x| x.unwrap().iter().map(String::from).collect())
        .collect()
}

const FOUR_ATOMS: &str = r#"{
  "id": "four",
  "space": {"kind": "finite", "atoms": [
    {"label": "1", "weight": 0.25}, {"label": "2", "weight": 0.25},
    {"label": "3", "weight": 0.25}, {"label": "4", "weight": 0.25}]},
  "partition": {"cells": [{"atoms": ["1", "2"]}, {"atoms": ["3", "4"]}]},
  "function": {"family": "table", "values": [0, 1, 2, 4]},
  "n": 2
}"#;

#[test]
fn small_exhaustive_suite_passes() {
    let o = linfqmc(&["verify", "--suite", "small-exhaustive", "--workers", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&stdout(&o));
    assert!(rows.len() >= 500, "{}", rows.len());
    assert!(rows.iter().all(|r| r[9] == "true"));
    let summary: serde_json::Value =
        serde_json::from_str(String::from_utf8_lossy(&o.stderr).lines().next().unwrap()).unwrap();
    assert_eq!(summary["failed"], 0);
    assert!(summary["worst_instance"]["space"].is_object());
}

#[test]
fn injected_violation_exits_one_with_replay() {
    let o = linfqmc(&["verify", "--suite", "random", "--count", "2", "--inject-violation"]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    let replay = err
        .lines()
        .find_map(|l| l.strip_prefix("replay "))
        .expect("replay line");
    assert!(linfqmc::instance::load_instance(replay).is_ok());
}

#[test]
fn verify_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "four.json", FOUR_ATOMS);
    let o = linfqmc(&["verify", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows[0][4], "0.75");
    assert_eq!(rows[0][7], "1.5");
    assert_eq!(rows[0][8], "0.5");
    assert_eq!(rows[0][10], "1 | 3");
}

#[test]
fn malformed_config_exits_two_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.json", "{\"space\": ");
    let out = dir.path().join("out.csv");
    let o = linfqmc(&["verify", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);

    assert_eq!(linfqmc(&["verify"]).status.code(), Some(2));
    assert_eq!(linfqmc(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(linfqmc(&["convergence", "--depth", "21"]).status.code(), Some(2));
}

#[test]
fn non_integer_allocation_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "odd.json", &FOUR_ATOMS.replace("\"n\": 2", "\"n\": 3"));
    let o = linfqmc(&["verify", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bounds_examples() {
    let dir = tempfile::tempdir().unwrap();
    let sq = write(
        dir.path(),
        "sq.json",
        r#"{"space": {"kind": "cube", "dimension": 1}, "partition": {"dyadic": 1},
            "function": {"family": "quadratic", "constant": 0, "linear": [0], "square": [1]}}"#,
    );
    let rows = csv_rows(&stdout(&linfqmc(&["bounds", "--config", &sq])));
    assert_eq!(&rows[0][2..5], ["0.75", "0.75", "0.5"]);

    let four = write(dir.path(), "four.json", &FOUR_ATOMS.replace(",\n  \"n\": 2", ""));
    let rows = csv_rows(&stdout(&linfqmc(&["bounds", "--config", &four])));
    assert_eq!(&rows[0][2..5], ["2", "2", "1.5"]);

    let c = write(
        dir.path(),
        "c.json",
        r#"{"space": {"kind": "cube", "dimension": 1}, "partition": {"dyadic": 3},
            "function": {"family": "constant", "value": 2.5}}"#,
    );
    let rows = csv_rows(&stdout(&linfqmc(&["bounds", "--config", &c])));
    assert_eq!(&rows[0][2..5], ["0", "0", "0"]);
}

#[test]
fn bounds_report_with_points() {
    let dir = tempfile::tempdir().unwrap();
    let sq = write(
        dir.path(),
        "sq.json",
        r#"{"space": {"kind": "cube", "dimension": 1}, "partition": {"dyadic": 1},
            "function": {"family": "quadratic", "constant": 0, "linear": [0], "square": [1]},
            "points": [[0.25], [0.75]]}"#,
    );
    let rows = csv_rows(&stdout(&linfqmc(&["bounds", "--config", &sq])));
    assert_eq!(rows[0][3], "0.3125");

    let bad = write(
        dir.path(),
        "bad.json",
        &std::fs::read_to_string(&sq).unwrap().replace("[0.75]", "[0.45]"),
    );
    assert_eq!(linfqmc(&["bounds", "--config", &bad]).status.code(), Some(2));

    let p = linfqmc::Partition::dyadic(1).unwrap();
    let nodes = [0.1, 0.9].map(linfqmc::Point::scalar);
    let text = linfqmc::points::write_point_set(&p, &nodes).unwrap();
    let pts = write(dir.path(), "pts.txt", &text);
    let plain = write(
        dir.path(),
        "plain.json",
        &std::fs::read_to_string(&sq)
            .unwrap()
            .replace(",\n            \"points\": [[0.25], [0.75]]", ""),
    );
    let o = linfqmc(&["bounds", "--config", &plain, "--points", &pts, "--format", "structured"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v[0]["estimate"].as_f64().unwrap() - 0.41).abs() < 1e-12);
}

#[test]
fn convergence_columns() {
    let rows = csv_rows(&stdout(&linfqmc(&[
        "convergence",
        "--family",
        "linear",
        "--depth",
        "5",
    ])));
    assert_eq!(rows.len(), 5);
    for r in &rows {
        let k: f64 = r[1].parse().unwrap();
        assert_eq!(r[5].parse::<f64>().unwrap(), 1.0 / k);
        assert_eq!(r[6], "0");
        assert_eq!(r[8].parse::<f64>().unwrap(), 0.5 / k);
        assert_eq!(r[9], "0.5");
    }
    let rows = csv_rows(&stdout(&linfqmc(&[
        "convergence",
        "--family",
        "constant",
        "--depth",
        "3",
        "--strategy",
        "random",
    ])));
    assert!(rows.iter().all(|r| r[3..9].iter().all(|v| v == "0")));
}

#[test]
fn perturb_table() {
    let o = linfqmc(&[
        "perturb",
        "--spikes",
        "5",
        "--spike-value",
        "1000",
        "--cells",
        "4",
        "--samples",
        "100",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&stdout(&o));
    for r in &rows[0..3] {
        assert_eq!((r[2].as_str(), r[3].as_str(), r[4].as_str()), ("0.25", "0.25", "true"));
    }
    assert_eq!(rows[4][1], "pointwise-foil");
    assert!(rows[4][3].parse::<f64>().unwrap() >= 999.125);
    assert_eq!(rows[6][4], "true");
}

#[test]
fn outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for (i, workers) in ["1", "4", "4"].iter().enumerate() {
        let out = dir.path().join(format!("run{i}.csv"));
        let o = linfqmc(&[
            "perturb",
            "--samples",
            "200",
            "--seed",
            "9",
            "--workers",
            workers,
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
        files.push(std::fs::read(&out).unwrap());
    }
    assert_eq!(files[0], files[1]);
    assert_eq!(files[1], files[2]);

    let a = linfqmc(&["verify", "--suite", "random", "--count", "30", "--workers", "1"]);
    let b = linfqmc(&["verify", "--suite", "random", "--count", "30", "--workers", "3"]);
    assert_eq!(a.stdout, b.stdout);
}
