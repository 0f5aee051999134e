use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

const TWO_BIDDERS: &str = r#"{"items": ["x"], "players": [
    {"type": "unit_demand", "values": {"x": 5}},
    {"type": "unit_demand", "values": {"x": 5}}
]}"#;

// The stated minimum-price raise stops above the Walrasian price here.
const OVERSHOOT: &str = r#"{"items": ["a", "b"], "players": [
    {"type": "truncation", "k": 2, "M": 7, "base": {"type": "unit_demand", "values": {"a": 4, "b": 3}}},
    {"type": "truncation", "k": 2, "M": 7, "base": {"type": "unit_demand", "values": {"a": 4, "b": 3}}},
    {"type": "truncation", "k": 2, "M": 7, "base": {"type": "unit_demand", "values": {"a": 5, "b": 2}}}
]}"#;

const COMPLEMENTS: &str = r#"{"items": ["a", "b"], "players": [
    {"type": "table", "values": {"": 0, "a": 0, "b": 0, "a,b": 3}},
    {"type": "unit_demand", "values": {"a": 2, "b": 2}}
]}"#;

struct Workspace {
    dir: TempDir,
}

impl Workspace {
    fn new() -> Self {
        Workspace {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn file(&self, name: &str, text: &str) -> PathBuf {
        let path = self.dir.path().join(name);
        fs::write(&path, text).unwrap();
        path
    }
}

fn walras(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_walras"))
        .args(args)
        .env_remove("WALRAS_BUDGET")
        .output()
        .unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

#[test]
fn every_engine_reaches_the_minimal_price() {
    let ws = Workspace::new();
    let inst = ws.file("two.json", TWO_BIDDERS);
    for algorithm in ["gs", "ausubel", "fine", "policy:random", "policy:min-index"] {
        let out = walras(&["run", "--instance", path(&inst), "--algorithm", algorithm]);
        assert_eq!(out.status.code(), Some(0), "{algorithm}");
        let report = stdout_json(&out);
        assert_eq!(report["trace"]["final_price"], json!({"x": 5}), "{algorithm}");
        assert_eq!(report["certified"], json!(true));
    }
}

#[test]
fn unknown_algorithm_is_an_input_error() {
    let ws = Workspace::new();
    let inst = ws.file("two.json", TWO_BIDDERS);
    let out = walras(&["run", "--instance", path(&inst), "--algorithm", "nope"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn uncertified_stop_exits_three() {
    let ws = Workspace::new();
    let inst = ws.file("overshoot.json", OVERSHOOT);
    let out = walras(&["run", "--instance", path(&inst), "--algorithm", "ggs2"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(stdout_json(&out)["certified"], json!(false));

    let out = walras(&["run", "--instance", path(&inst), "--algorithm", "ggs2-obstacle-first"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["trace"]["final_price"], json!({"a": 4, "b": 3}));
}

#[test]
fn report_goes_to_out_file() {
    let ws = Workspace::new();
    let inst = ws.file("two.json", TWO_BIDDERS);
    let target = ws.dir.path().join("report.json");
    let out = walras(&["run", "--instance", path(&inst), "--out", path(&target)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let report: Value = serde_json::from_str(&fs::read_to_string(&target).unwrap()).unwrap();
    assert_eq!(report["trace"]["algorithm"], json!("gs"));
}

#[test]
fn malformed_instances_exit_one() {
    let ws = Workspace::new();
    let bad = ws.file("bad.json", "{\"items\": [");
    let out = walras(&["run", "--instance", path(&bad)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));

    let missing = ws.dir.path().join("missing.json");
    assert_eq!(walras(&["run", "--instance", path(&missing)]).status.code(), Some(1));
}

#[test]
fn oracle_queries() {
    let ws = Workspace::new();
    let inst = ws.file("two.json", TWO_BIDDERS);
    let out = walras(&["oracle", "min-walrasian", "--instance", path(&inst)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out), json!({"x": 5}));

    let out = walras(&["oracle", "welfare", "--instance", path(&inst)]);
    assert_eq!(stdout_json(&out)["value"], json!(5));

    let out = walras(&["oracle", "envy-free", "--instance", path(&inst), "--price", r#"{"x": 0}"#]);
    assert_eq!(stdout_json(&out), Value::Null);
    let out = walras(&["oracle", "envy-free", "--instance", path(&inst), "--price", r#"{"x": 5}"#]);
    assert_eq!(stdout_json(&out), json!([["x"], []]));
}

#[test]
fn price_can_come_from_a_file() {
    let ws = Workspace::new();
    let inst = ws.file("two.json", TWO_BIDDERS);
    let price = ws.file("price.json", r#"{"x": 5}"#);
    let out = walras(&["inspect", "--instance", path(&inst), "--price", path(&price)]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    assert_eq!(report["lyapunov"], json!(5));
    assert_eq!(report["obstacle"]["o_star"], json!([]));
}

#[test]
fn complements_have_no_walrasian_price() {
    let ws = Workspace::new();
    let inst = ws.file("complements.json", COMPLEMENTS);
    let out = walras(&["oracle", "min-walrasian", "--instance", path(&inst)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out), Value::Null);

    let out = walras(&["check", "gs", "--instance", path(&inst)]);
    assert_eq!(out.status.code(), Some(1));
    let report = stdout_json(&out);
    assert_eq!(report["pass"], json!(false));
    assert_eq!(report["players"][0]["gs"], json!(false));
    assert_eq!(report["players"][1]["gs"], json!(true));
}

#[test]
fn structure_checks_on_a_gs_instance() {
    let ws = Workspace::new();
    let inst = ws.file("two.json", TWO_BIDDERS);
    for what in ["gs", "matroid", "lemmas"] {
        let out = walras(&["check", what, "--instance", path(&inst)]);
        assert_eq!(out.status.code(), Some(0), "{what}");
        assert_eq!(stdout_json(&out)["pass"], json!(true), "{what}");
    }
}

#[test]
fn ggs2_shape_reports_m() {
    let ws = Workspace::new();
    let inst = ws.file("overshoot.json", OVERSHOOT);
    let out = walras(&["check", "ggs2-shape", "--instance", path(&inst)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["M"], json!(7));

    let mixed = ws.file("complements.json", COMPLEMENTS);
    let out = walras(&["check", "ggs2-shape", "--instance", path(&mixed)]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout_json(&out)["pass"], json!(false));
}

#[test]
fn demos_reproduce() {
    for name in ["ggs2-not-gs", "no-obstacle-no-allocation"] {
        let out = walras(&["demo", name]);
        assert_eq!(out.status.code(), Some(0), "{name}");
        assert_eq!(stdout_json(&out)["reproduced"], json!(true), "{name}");
    }
    assert_eq!(walras(&["demo", "no-such-demo"]).status.code(), Some(1));
}

#[test]
fn budget_flag_beats_environment() {
    let ws = Workspace::new();
    let inst = ws.file("two.json", TWO_BIDDERS);
    let args = ["oracle", "welfare", "--instance", path(&inst)];

    let starved = Command::new(env!("CARGO_BIN_EXE_walras"))
        .args(args)
        .env("WALRAS_BUDGET", "1")
        .output()
        .unwrap();
    assert_eq!(starved.status.code(), Some(1));

    let rescued = Command::new(env!("CARGO_BIN_EXE_walras"))
        .args(args)
        .args(["--budget", "1000"])
        .env("WALRAS_BUDGET", "1")
        .output()
        .unwrap();
    assert_eq!(rescued.status.code(), Some(0));
}
