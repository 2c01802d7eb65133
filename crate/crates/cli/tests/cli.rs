use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn realtree(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_realtree"))
        .args(args)
        .env_remove("REALTREE_THREADS")
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn square(dir: &Path) -> PathBuf {
    let s = std::f64::consts::SQRT_2;
    let text = format!(
        r#"{{"points":["a","b","c","d"],"d":[[0,1,{s},1],[1,0,1,{s}],[{s},1,0,1],[1,{s},1,0]]}}"#
    );
    write(dir, "square.json", &text)
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn check_reports_the_square() {
    let dir = TempDir::new().unwrap();
    let sq = square(dir.path());
    let out = realtree(&["check", path(&sq)]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["delta"].as_f64().unwrap(), 0.414213562373);
    assert_eq!(v["is_tree"], Value::Bool(false));
    let w: Vec<&str> = v["witness"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_str().unwrap())
        .collect();
    let mut sorted = w.clone();
    sorted.sort_unstable();
    assert_eq!(sorted, ["a", "b", "c", "d"]);
    // Diagonal pairs are the largest pairing sum.
    assert!(matches!(
        (w[0], w[1]),
        ("a", "c") | ("c", "a") | ("b", "d") | ("d", "b")
    ));
}

#[test]
fn realize_rejects_the_square() {
    let dir = TempDir::new().unwrap();
    let sq = square(dir.path());
    let out = realtree(&["realize", path(&sq)]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(
        err.contains("four-point") && err.contains("0.414213562373"),
        "{err}"
    );
}

#[test]
fn realize_round_trips_a_tree_metric() {
    let dir = TempDir::new().unwrap();
    let m = write(
        dir.path(),
        "star.json",
        r#"{"points":["x","y","z"],"d":[[0,3,4],[3,0,5],[4,5,0]]}"#,
    );
    let out = realtree(&["realize", "--rational", path(&m)]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["verification"]["max_abs"], Value::from(0));
    assert_eq!(v["tree"]["vertices"].as_array().unwrap().len(), 4);
}

#[test]
fn crt_samples_are_byte_identical() {
    let a = realtree(&["sample", "crt", "--n", "64", "--seed", "7"]);
    let b = realtree(&["sample", "crt", "--n", "64", "--seed", "7"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = realtree(&["sample", "crt", "--n", "64", "--seed", "8"]);
    assert_ne!(a.stdout, c.stdout);
    let threads = Command::new(env!("CARGO_BIN_EXE_realtree"))
        .args(["sample", "crt", "--n", "64", "--seed", "7"])
        .env("REALTREE_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(a.stdout, threads.stdout);
}

#[test]
fn malformed_input_exits_with_two() {
    let dir = TempDir::new().unwrap();
    let bad = write(dir.path(), "bad.json", "{not json");
    assert_eq!(realtree(&["check", path(&bad)]).status.code(), Some(2));
    let asym = write(
        dir.path(),
        "asym.json",
        r#"{"points":["a","b"],"d":[[0,1],[2,0]]}"#,
    );
    let out = realtree(&["check", path(&asym)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("symmetry"));
    assert_eq!(
        realtree(&["check", "missing-file.json"]).status.code(),
        Some(2)
    );
    let out = realtree(&["check", "--bogus-flag", path(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr)
        .unwrap()
        .contains("--bogus-flag"));
    let ex = write(dir.path(), "ex.txt", "2 2\n0 1 1\n");
    assert_eq!(
        realtree(&["build", "excursion", path(&ex)]).status.code(),
        Some(2)
    );
}

#[test]
fn excursion_build_and_queries() {
    let dir = TempDir::new().unwrap();
    let ex = write(dir.path(), "cherry.txt", "6 6\n0 1 2 1 2 1 0\n");
    let out = realtree(&["build", "excursion", "--rational", path(&ex)]);
    assert_eq!(out.status.code(), Some(0));
    let tree = write(
        dir.path(),
        "cherry.json",
        std::str::from_utf8(&out.stdout).unwrap(),
    );
    let t = path(&tree);
    let q = |args: &[&str]| {
        let mut all = vec!["query"];
        all.extend_from_slice(args);
        all.push("--rational");
        json(&realtree(&all))
    };
    assert_eq!(q(&["meet", t, "t2", "t4"])["meet"], "t1");
    assert_eq!(q(&["distance", t, "t2", "t0-t1@1/2"])["distance"], "3/2");
    assert_eq!(q(&["median", t, "t0", "t2", "t4"])["median"], "t1");
    assert_eq!(q(&["degree", t, "t1"])["degree"], 3);
    assert_eq!(q(&["span", t, "t2", "t4"])["length"], 2);
    assert_eq!(
        q(&["segment", t, "t2", "t4"])["cumulative"],
        serde_json::json!([0, 1, 2])
    );

    let out = realtree(&["build", "contour", "--rational", t]);
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "6 6\n0 1 2 1 2 1 0\n"
    );

    let m = json(&realtree(&[
        "measure",
        "--rational",
        t,
        "--segment",
        "t2,t4",
        "--span",
        "t0,t2,t4",
    ]));
    assert_eq!(m["total"], 3);
    assert_eq!(m["queried_sets"][1]["measure"], 3);

    let unrooted = write(
        dir.path(),
        "path.json",
        r#"{"vertices":["a","b"],"edges":[{"u":"a","v":"b","len":1}]}"#,
    );
    assert_eq!(
        realtree(&["query", "meet", path(&unrooted), "a", "b"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        realtree(&["query", "distance", path(&unrooted), "a", "zz"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn probe_writes_csv() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("probe.csv");
    let out_path = dir.path().join("probe.json");
    let out = realtree(&[
        "measure",
        "--probe",
        "--n",
        "20",
        "--csv",
        path(&csv),
        "--out",
        path(&out_path),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&fs::read_to_string(&out_path).unwrap()).unwrap();
    assert!((v["leaf_dimension_estimate"].as_f64().unwrap() - 0.5).abs() < 0.05);
    let table = fs::read_to_string(&csv).unwrap();
    assert!(table.starts_with("k,count,scale\n1,2,"));
    assert_eq!(table.lines().count(), 21);
}

#[test]
fn gh_and_triangles() {
    let dir = TempDir::new().unwrap();
    let pt = write(dir.path(), "pt.json", r#"{"points":["0"],"d":[[0]]}"#);
    let seg = write(
        dir.path(),
        "seg.json",
        r#"{"points":["0","1","2"],"d":[[0,1,2],[1,0,1],[2,1,0]]}"#,
    );
    let v = json(&realtree(&[
        "gh",
        "--rational",
        "--witness",
        path(&pt),
        path(&seg),
    ]));
    assert_eq!(v["value"], 1);
    assert_eq!(v["witness"].as_array().unwrap().len(), 3);
    let big = write(
        dir.path(),
        "big.json",
        r#"{"points":["0","1","2","3"],"d":[[0,1,2,3],[1,0,1,2],[2,1,0,1],[3,2,1,0]]}"#,
    );
    assert_eq!(
        realtree(&["gh", "--max-points", "3", path(&big), path(&seg)])
            .status
            .code(),
        Some(1)
    );

    let c4 = write(
        dir.path(),
        "c4.json",
        r#"{"vertices":["1","2","3","4"],"edges":[{"u":"1","v":"2","len":1},{"u":"2","v":"3","len":1},{"u":"3","v":"4","len":1},{"u":"4","v":"1","len":1}]}"#,
    );
    let g = path(&c4);
    let thin = json(&realtree(&[
        "triangle",
        "thin",
        "--rational",
        g,
        "--corners",
        "1,2,3",
        "--xz",
        "1,4,3",
        "--subdiv",
        "2",
    ]));
    assert_eq!(thin["thin"], 2);
    let slim = json(&realtree(&[
        "triangle",
        "slim",
        "--rational",
        g,
        "--corners",
        "1,2,3",
        "--xz",
        "1,4,3",
    ]));
    assert_eq!(slim["slim"], 1);
    let c = json(&realtree(&[
        "triangle",
        "constants",
        "--rational",
        g,
        "--subdiv",
        "2",
    ]));
    assert_eq!(
        (c["thin"].clone(), c["slim"].clone(), c["delta_4pt"].clone()),
        (2.into(), 1.into(), 1.into())
    );
    let not_geodesic = realtree(&[
        "triangle",
        "thin",
        g,
        "--corners",
        "1,2,4",
        "--xz",
        "1,2,3,4",
    ]);
    assert_eq!(not_geodesic.status.code(), Some(1));
}

#[test]
fn sampling_commands() {
    let out = realtree(&["sample", "dyck", "--n", "5", "--seed", "3"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("10 10"));
    let h: Vec<i64> = lines
        .next()
        .unwrap()
        .split_whitespace()
        .map(|x| x.parse().unwrap())
        .collect();
    assert_eq!(h.len(), 11);
    assert!(h.windows(2).all(|w| (w[0] - w[1]).abs() == 1) && h.iter().all(|&x| x >= 0));

    let stats = json(&realtree(&[
        "sample", "crt", "--n", "32", "--seed", "1", "--stats",
    ]));
    assert!(stats["leaf_count"].as_u64().unwrap() >= 1);
    let batch = json(&realtree(&["sample", "crt", "--n", "16", "--count", "3"]));
    assert_eq!(batch.as_array().unwrap().len(), 3);

    let dir = TempDir::new().unwrap();
    let ex = write(dir.path(), "tent.txt", "2 2\n0 1 0\n");
    let v = json(&realtree(&[
        "sample",
        "leaf",
        path(&ex),
        "--count",
        "4",
        "--seed",
        "2",
    ]));
    assert_eq!(v["points"].as_array().unwrap().len(), 4);
    assert_eq!(
        realtree(&["sample", "crt", "--n", "0"]).status.code(),
        Some(2)
    );
}

#[test]
fn build_order_and_binary() {
    let dir = TempDir::new().unwrap();
    let order = write(
        dir.path(),
        "order.json",
        r#"{"elements":[{"id":"m","parent":null,"h":1},{"id":"x","parent":"m","h":2},{"id":"y","parent":"m","h":3}]}"#,
    );
    let m = json(&realtree(&["build", "order", "--rational", path(&order)]));
    assert_eq!(m["d"][1][2], 3);
    let forest = write(
        dir.path(),
        "forest.json",
        r#"{"elements":[{"id":"a","parent":null,"h":0},{"id":"b","parent":null,"h":1}]}"#,
    );
    assert_eq!(
        realtree(&["build", "order", path(&forest)]).status.code(),
        Some(1)
    );
    let t = json(&realtree(&["build", "binary", "--n", "3", "--rational"]));
    assert_eq!(t["vertices"].as_array().unwrap().len(), 15);
    assert_eq!(
        realtree(&["build", "binary", "--n", "3", "--rational", "--gamma", "2"])
            .status
            .code(),
        Some(2)
    );
}
