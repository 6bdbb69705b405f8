use std::path::Path;
use std::process::{Command, Output};

fn evendeg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_evendeg")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn k4_is_not_even_degenerate() {
    let dir = tempfile::tempdir().unwrap();
    let k4 = path(dir.path(), "k4.txt");
    assert_eq!(code(&evendeg(&["gen", "--family", "complete", "--n", "4", "--out", &k4])), 0);
    let out = evendeg(&["check", "--graph", &k4]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["even_degenerate"], false);
    assert_eq!(v["method"], "dp");
    assert_eq!(code(&evendeg(&["check", "--graph", &k4, "--expect-degenerate"])), 1);
}

#[test]
fn gen_round_trips_and_repeats() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (path(dir.path(), "a.txt"), path(dir.path(), "b.txt"));
    for f in [&a, &b] {
        assert_eq!(code(&evendeg(&["gen", "--n", "10", "--p", "0.5", "--seed", "7", "--out", f])), 0);
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    let g = evendeg::Graph::from_text(&text).unwrap();
    assert_eq!(g.n(), 10);
    assert_eq!(g.to_text(), text);
}

#[test]
fn randomized_commands_need_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    let g = path(dir.path(), "g.txt");
    assert_eq!(code(&evendeg(&["gen", "--n", "10", "--p", "0.5"])), 2);
    assert_eq!(code(&evendeg(&["gen", "--family", "path", "--n", "30", "--out", &g])), 0);
    assert_eq!(code(&evendeg(&["remove", "--graph", &g])), 2);
    let mc = ["stats", "--lemma", "bipartite", "--params", r#"{"a":2,"b":2,"p":0.5}"#, "--mode", "mc"];
    assert_eq!(code(&evendeg(&mc)), 2);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&evendeg(&["check", "--graph", "x", "--bogus"])), 2);
    assert_eq!(code(&evendeg(&["check", "--graph", "/nonexistent/graph.txt"])), 2);
    assert_eq!(code(&evendeg(&["stats", "--lemma", "single-parity", "--params", r#"{"p":0.5}"#])), 2);
}

#[test]
fn recursive_removal_on_empty_graph() {
    let dir = tempfile::tempdir().unwrap();
    let g = path(dir.path(), "empty.txt");
    assert_eq!(code(&evendeg(&["gen", "--family", "empty", "--n", "100", "--out", &g])), 0);
    let out = evendeg(&["remove", "--graph", &g, "--mode", "recursive", "--seed", "1", "--expect-success"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["verified"], true);
    assert_eq!(v["order"].as_array().unwrap().len(), 100);
}

#[test]
fn stats_reports_hold() {
    let out = evendeg(&["stats", "--lemma", "single-parity", "--params", r#"{"p":0.2,"eta":7}"#]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["holds"], true);

    let layered = r#"{"family":{"t":8,"sets":[[0,1,2,3],[4,5,6,7]]},"p":0.5}"#;
    let out = evendeg(&["stats", "--lemma", "layered", "--params", layered]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));

    let transformed = r#"{"family":{"t":8,"sets":[[0,1,2,3],[4,5,6,7]]},"p":0.4,"transform":[[1,1],[0,1]]}"#;
    let out = evendeg(&["stats", "--lemma", "transformed", "--params", transformed]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&out)["result"]["event_identity"], true);

    let affected = r#"{"family":{"t":14,"sets":[[0,2,3,4,5,6,7,8],[1,9,10,11,12,13]]},"k":2,"p":0.35}"#;
    let out = evendeg(&["stats", "--lemma", "affected", "--params", affected]);
    assert_eq!(code(&out), 0);

    let bip = r#"{"a":3,"b":3,"p":0.4}"#;
    let out = evendeg(&[
        "stats",
        "--lemma",
        "bipartite",
        "--params",
        bip,
        "--mode",
        "mc",
        "--trials",
        "20000",
        "--seed",
        "3",
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["result"]["report"]["fixParity"]["parity"], 0);
}

#[test]
fn experiment_and_recurrence_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let spec = path(dir.path(), "spec.json");
    std::fs::write(&spec, r#"{"kind":"removal-success","nGrid":[150],"pGrid":[0.5],"trials":8,"masterSeed":2}"#)
        .unwrap();
    let (csv, report, svg) = (path(dir.path(), "o.csv"), path(dir.path(), "r.json"), path(dir.path(), "p.svg"));
    let out = evendeg(&["experiment", "--spec", &spec, "--out", &csv, "--report", &report, "--svg", &svg]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 2);
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r["masterSeed"], 2);
    assert!(std::fs::read_to_string(&svg).unwrap().starts_with("<svg"));

    let params = path(dir.path(), "rec.json");
    std::fs::write(&params, r#"{"K":1,"alpha":0.1,"c":0.01,"baseBound":0.001}"#).unwrap();
    let bounds = path(dir.path(), "b.csv");
    let out = evendeg(&["recurrence", "--params", &params, "--horizon", "10000", "--out", &bounds]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["status"]["status"], "verified");
    std::fs::write(&params, r#"{"K":1,"alpha":0.1,"c":0.01,"baseBound":0.9}"#).unwrap();
    assert_eq!(code(&evendeg(&["recurrence", "--params", &params, "--horizon", "100"])), 1);
}
