use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn median(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_median"))
        .args(args)
        .output()
        .expect("spawn median")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write_line_metric(dir: &Path) -> PathBuf {
    let path = dir.join("line.json");
    fs::write(
        &path,
        r#"{"kind":"matrix","n":4,"dist_lower_triangle":[1,2,1,3,2,1]}"#,
    )
    .unwrap();
    path
}

#[test]
fn gen_euclidean_writes_points() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("a.json");
    let o = median(&[
        "gen",
        "--kind",
        "euclidean",
        "--n",
        "100",
        "--dim",
        "2",
        "--seed",
        "7",
        "--out",
        s(&out),
    ]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).contains("n=100"));
    let v: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["kind"], "euclidean");
    assert_eq!(v["points"].as_array().unwrap().len(), 100);
    assert!(v.get("dist_lower_triangle").is_none());
}

#[test]
fn gen_graph_validates() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.json");
    let o = median(&[
        "gen",
        "--kind",
        "graph",
        "--n",
        "50",
        "--seed",
        "1",
        "--out",
        s(&out),
    ]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(
        v["dist_lower_triangle"].as_array().unwrap().len(),
        50 * 49 / 2
    );
    let o = median(&["validate", "--input", s(&out)]);
    assert!(o.status.success());
    assert_eq!(String::from_utf8_lossy(&o.stdout).trim(), "ok");
}

#[test]
fn gen_without_n_is_usage_error() {
    let o = median(&["gen", "--kind", "matrix", "--out", "x.json"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn run_line_metric_exact() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_line_metric(dir.path());
    let report = dir.path().join("r.json");
    let o = median(&[
        "run",
        "--input",
        s(&input),
        "--h",
        "2",
        "--exact",
        "--out",
        s(&report),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["output_index"], 3);
    assert_eq!(v["ratio"], 1.5);
    assert_eq!(v["t"], 2);
    assert_eq!(v["sigma"], 1);
    assert_eq!(v["query_bound"], 9);
    assert!(v["distinct_queries"].as_u64().unwrap() <= 9);
}

#[test]
fn run_reports_are_stable_modulo_runtime() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("p.json");
    assert!(median(&[
        "gen",
        "--kind",
        "perturbed-uniform",
        "--n",
        "80",
        "--seed",
        "3",
        "--out",
        s(&input)
    ])
    .status
    .success());
    let mut docs = Vec::new();
    for name in ["a.json", "b.json"] {
        let out = dir.path().join(name);
        assert!(median(&[
            "run",
            "--input",
            s(&input),
            "--h",
            "3",
            "--exact",
            "--tilde",
            "--out",
            s(&out)
        ])
        .status
        .success());
        let mut v: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
        v.as_object_mut().unwrap().remove("runtime_ms");
        docs.push(v);
    }
    assert_eq!(docs[0], docs[1]);
    assert!(docs[0]["tilde_queries"].as_u64().is_some());
}

#[test]
fn run_rejects_h_one() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_line_metric(dir.path());
    let o = median(&["run", "--input", s(&input), "--h", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn run_h_from_epsilon() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("e.json");
    assert!(median(&[
        "gen",
        "--kind",
        "euclidean",
        "--n",
        "1024",
        "--seed",
        "0",
        "--out",
        s(&input)
    ])
    .status
    .success());
    let out = dir.path().join("r.json");
    let o = median(&[
        "run",
        "--input",
        s(&input),
        "--h-from-epsilon",
        "1.0",
        "--exact",
        "--out",
        s(&out),
    ]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["h"], 5);
    assert!(v["ratio"].as_f64().unwrap() <= 10.0);
}

#[test]
fn run_rejects_invalid_metric() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bad.json");
    fs::write(
        &input,
        r#"{"kind":"matrix","n":3,"dist_lower_triangle":[1,5,1]}"#,
    )
    .unwrap();
    let o = median(&["run", "--input", s(&input), "--h", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("triangle violation (0,1,2)"));
}

#[test]
fn validate_outcomes() {
    let dir = tempfile::tempdir().unwrap();
    let good = write_line_metric(dir.path());
    let o = median(&["validate", "--input", s(&good)]);
    assert!(o.status.success());
    assert_eq!(String::from_utf8_lossy(&o.stdout).trim(), "ok");

    let bad = dir.path().join("bad.json");
    fs::write(
        &bad,
        r#"{"kind":"matrix","n":3,"dist_lower_triangle":[1,5,1]}"#,
    )
    .unwrap();
    let o = median(&["validate", "--input", s(&bad)]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).contains("(0,1,2)"));

    let o = median(&["validate", "--input", s(&dir.path().join("missing.json"))]);
    assert_eq!(o.status.code(), Some(2));

    let both = dir.path().join("both.json");
    fs::write(
        &both,
        r#"{"kind":"matrix","n":2,"dist_lower_triangle":[1],"points":[[0],[1]]}"#,
    )
    .unwrap();
    assert_eq!(
        median(&["validate", "--input", s(&both)]).status.code(),
        Some(2)
    );
}

#[test]
fn bench_writes_csv_and_audits() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("out.csv");
    let o = median(&[
        "bench",
        "--n-list",
        "64",
        "--h-list",
        "2",
        "--kinds",
        "perturbed-uniform",
        "--trials",
        "5",
        "--seed",
        "0",
        "--csv",
        s(&csv_path),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    let text = fs::read_to_string(&csv_path).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "n,h,t,sigma,kind,seed,output_index,output_cost,exact_cost,ratio,distinct_queries,query_bound,tilde_queries,transcript_hash,runtime_ms"
    );
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 5);
    assert!(rows.iter().all(|r| r[13] == rows[0][13]));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("max ratio h=2"));
}

#[test]
fn bench_tilde_column() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("t.csv");
    let o = median(&[
        "bench",
        "--n-list",
        "1024",
        "--h-list",
        "2,3",
        "--kinds",
        "euclidean",
        "--tilde",
        "--csv",
        s(&csv_path),
    ]);
    assert!(o.status.success());
    let mut reader = csv::Reader::from_path(&csv_path).unwrap();
    for rec in reader.records() {
        let rec = rec.unwrap();
        let h: f64 = rec[1].parse().unwrap();
        let distinct: f64 = rec[10].parse().unwrap();
        let tilde: f64 = rec[12].parse().unwrap();
        assert!(tilde / distinct >= h / 2.0);
    }
    assert!(String::from_utf8_lossy(&o.stdout).contains("mean tilde_queries/distinct_queries"));
}
