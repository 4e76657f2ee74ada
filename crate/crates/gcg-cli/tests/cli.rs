use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;
use tempfile::TempDir;

fn gcg(args: &[&str]) -> (i32, Value, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_gcg")).args(args).output().expect("binary runs");
    let stdout = String::from_utf8(out.stdout).unwrap();
    let value = serde_json::from_str(&stdout).unwrap_or(Value::Null);
    (out.status.code().unwrap(), value, String::from_utf8(out.stderr).unwrap())
}

fn example(dir: &TempDir, name: &str, args: &[&str]) -> PathBuf {
    let path = dir.path().join(name);
    let mut full = vec!["example"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--out", path.to_str().unwrap()]);
    let (code, _, err) = gcg(&full);
    assert_eq!(code, 0, "{err}");
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn validate_exit_codes() {
    let dir = TempDir::new().unwrap();
    let klein = example(&dir, "klein.json", &["klein-torus"]);
    assert_eq!(gcg(&["validate", s(&klein)]).0, 0);

    let mut data: Value = serde_json::from_str(&std::fs::read_to_string(&klein).unwrap()).unwrap();
    let first = data["poset"]["edges"][0].clone();
    data["poset"]["edges"].as_array_mut().unwrap().push(first.clone());
    let dup = dir.path().join("dup.json");
    std::fs::write(&dup, data.to_string()).unwrap();
    let (code, out, _) = gcg(&["validate", s(&dup)]);
    assert_eq!(code, 1);
    assert_eq!(out["witness"], first);

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\n  \"poset\": {\n    oops\n").unwrap();
    let (code, _, err) = gcg(&["validate", s(&bad)]);
    assert_eq!(code, 2);
    assert!(err.contains("bad.json:3:"), "{err}");
}

#[test]
fn classify_verdicts() {
    let dir = TempDir::new().unwrap();
    let r12 = example(&dir, "r12.json", &["racg-cycle", "--n", "6"]);
    let (code, out, _) = gcg(&["classify", s(&r12)]);
    assert_eq!(
        (code, out["verdict"].as_str(), out["reason"].as_str()),
        (0, Some("Hyperbolic"), Some("NoProperTriple"))
    );

    let klein = example(&dir, "klein.json", &["klein-torus"]);
    assert_eq!(gcg(&["classify", s(&klein)]).1["verdict"], "FlatFound");

    // a pentagon is only 5-huge, so this goes through the C(5)–T(4) metric
    let graph = dir.path().join("c5.json");
    std::fs::write(&graph, r#"{"vertices": 5, "edges": [[0,1],[1,2],[2,3],[3,4],[4,0]]}"#).unwrap();
    let c5 = example(&dir, "c5gp.json", &["graphical-product", "--graph", s(&graph), "--orders", "3,3,3,3,3"]);
    let (code, out, _) = gcg(&["classify", s(&c5)]);
    assert_eq!(out["verdict"], "Hyperbolic");
    assert_eq!(out["reason"], "C5T4Metric");
    assert_eq!(code, 0);

    let hex = example(&dir, "k4.json", &["racg-bipartite", "--n", "2", "--m", "3"]);
    let (code, out, _) = gcg(&["classify", s(&hex)]);
    assert_eq!(out["verdict"], "Inconclusive");
    assert_eq!(code, 0);
}

#[test]
fn out_of_theory_is_exit_three() {
    let dir = TempDir::new().unwrap();
    let tri = example(&dir, "tri.json", &["racg-cycle", "--n", "3"]);
    let (code, out, _) = gcg(&["classify", s(&tri)]);
    assert_eq!(out["verdict"], "OutOfTheory");
    assert_eq!(code, 3);
    assert_eq!(gcg(&["develop", s(&tri), "--out", s(&dir.path().join("b.json"))]).0, 3);
}

#[test]
fn develop_resolve_and_ball_commands() {
    let dir = TempDir::new().unwrap();
    let r12 = example(&dir, "r12.json", &["racg-cycle", "--n", "6"]);
    let ball = dir.path().join("ball.json");
    let dot = dir.path().join("ball.dot");
    let (code, out, _) = gcg(&["develop", s(&r12), "--radius", "2", "--out", s(&ball), "--dot", s(&dot)]);
    assert_eq!(code, 0);
    assert_eq!(out["cells"], 85);
    assert!(std::fs::read_to_string(&dot).unwrap().starts_with("graph"));

    let (code, out, _) = gcg(&["resolve", "--ball", s(&ball), "--word", "0:1,1:1"]);
    assert_eq!(code, 0);
    assert!(out["distance"].as_u64().is_some_and(|d| d <= 2));
    let (code, out, _) = gcg(&["resolve", "--ball", s(&ball), "--word", "0:1,2:1,4:1"]);
    assert_eq!(code, 1);
    assert!(out["error"].is_object());

    assert_eq!(gcg(&["pieces", "--ball", s(&ball)]).1["max_len"], 2);
    assert_eq!(gcg(&["ck", "--ball", s(&ball), "--k", "6"]).0, 0);
    assert_eq!(gcg(&["wise", "--ball", s(&ball)]).1["dimension"], 3);
    assert_eq!(gcg(&["links", s(&r12), "--ball", s(&ball)]).0, 0);
    let (code, out, _) = gcg(&["wise", s(&r12), "--radius", "3", "--check-large", "6"]);
    assert_eq!((code, out["holds"].as_bool()), (0, Some(true)));

    // a saved ball is recognised without --ball, and --in names the file
    let nerve = dir.path().join("nerve.json");
    let nerve_dot = dir.path().join("nerve.dot");
    let (code, out, _) = gcg(&["wise", "--in", s(&ball), "--out", s(&nerve), "--dot", s(&nerve_dot)]);
    assert_eq!((code, out["dimension"].as_u64()), (0, Some(3)));
    let data: Value = serde_json::from_str(&std::fs::read_to_string(&nerve).unwrap()).unwrap();
    assert_eq!(data["vertices"], 85);
    assert!(data["simplices"].as_array().unwrap().iter().all(|s| s.as_array().unwrap().len() <= 4));
    assert!(std::fs::read_to_string(&nerve_dot).unwrap().starts_with("graph nerve"));
    assert_eq!(gcg(&["develop", "--in", s(&r12), "--radius", "1", "--out", s(&ball)]).0, 0);
    assert_eq!(gcg(&["classify"]).0, 2);
}

#[test]
fn links_and_huge() {
    let dir = TempDir::new().unwrap();
    let klein = example(&dir, "klein.json", &["klein-torus"]);
    assert_eq!(gcg(&["huge", s(&klein), "--k", "6"]).0, 0);
    assert_eq!(gcg(&["huge", s(&klein), "--k", "7"]).0, 1);
    assert_eq!(gcg(&["links", s(&klein), "--angles", "c6"]).0, 0);
    assert_eq!(gcg(&["links", s(&klein), "--angles", "c6hyp"]).0, 1);
    assert_eq!(gcg(&["t4", s(&klein)]).0, 1);
    assert_eq!(gcg(&["triples", s(&klein)]).1["found"], true);
    assert_eq!(gcg(&["links", s(&klein), "--angles", "bogus"]).0, 2);
}

#[test]
fn flat_with_svg() {
    let dir = TempDir::new().unwrap();
    let klein = example(&dir, "klein.json", &["klein-torus"]);
    let svg = dir.path().join("flat.svg");
    let (code, out, err) = gcg(&["flat", s(&klein), "--patch", "3x3", "--svg", s(&svg)]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(out["consistency"]["verdict"], "consistent");
    assert_eq!(std::fs::read_to_string(&svg).unwrap().matches("<polygon").count(), 9);
}

#[test]
fn report_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let r12 = example(&dir, "r12.json", &["racg-cycle", "--n", "6"]);
    let (code, a, _) = gcg(&["report", s(&r12), "--radius", "3"]);
    let (_, b, _) = gcg(&["report", s(&r12), "--radius", "3"]);
    assert_eq!(code, 0);
    assert_eq!(a, b);
    let c = &a["certificates"];
    assert_eq!(c["ck"]["verdict"], "pass");
    assert_eq!(c["nerve_dimension"]["report"]["dimension"], 3);
    assert_eq!(c["classify"]["verdict"], "Hyperbolic");
    assert!(a.get("timing_ms").is_none());
    assert_eq!(a["input_digest"].as_str().unwrap().len(), 64);

    let (_, t, _) = gcg(&["report", s(&r12), "--radius", "2", "--timing"]);
    assert!(t["timing_ms"].is_object());
}

#[test]
fn report_on_the_square() {
    let dir = TempDir::new().unwrap();
    let square = example(&dir, "sq.json", &["racg-cycle", "--n", "4"]);
    let (code, out, _) = gcg(&["report", s(&square), "--radius", "3", "--c4t4"]);
    assert_eq!(code, 0);
    let c = &out["certificates"];
    assert_eq!(c["ck"]["verdict"], "pass");
    assert_eq!(c["triples"]["t4"], true);
    assert_eq!(c["retriangulation"]["square_grid"], true);
}

#[test]
fn example_families() {
    let dir = TempDir::new().unwrap();
    let graph = dir.path().join("g.json");
    std::fs::write(&graph, r#"{"vertices": 6, "edges": [[0,1],[1,2],[2,3],[3,4],[4,5],[5,0]]}"#).unwrap();
    let labels = dir.path().join("l.json");
    std::fs::write(&labels, "[2, 2, 2, 2, 2, 2]").unwrap();
    let cox = example(&dir, "cox.json", &["coxeter", "--graph", s(&graph), "--labels", s(&labels)]);
    let double = example(&dir, "double.json", &["torus-double", "--direction", "0"]);
    for p in [cox, double] {
        assert_eq!(gcg(&["validate", s(&p)]).0, 0);
    }
    assert_eq!(gcg(&["example", "torus-double", "--direction", "5"]).0, 2);
}
