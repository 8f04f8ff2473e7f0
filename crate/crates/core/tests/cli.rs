use std::collections::BTreeMap;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const EXAMPLE3: &str = r#"
[process]
family = "example3"
delta = 0.1
x0 = 1000

[rule]
x_min = 1
mode = "below"

[hypothesis]
kind = "variable"
h = { kind = "linear", delta = 0.1 }

[simulation]
trials = 10
max_steps = 1000
"#;

const WALK: &str = r#"
[process]
family = "biased_walk"
n_states = 12
p_down = 0.7
start = 6

[hypothesis]
kind = "additive_upper"
delta = 0.4
state_bound_c = 11

[simulation]
trials = 3000
max_steps = 10000
master_seed = 9
"#;

const UNIT_CHAIN: &str = r#"
[process]
family = "markov"
state_values = [0, 1, 2, 3]
transition_rows = [[1, 0, 0, 0], [1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0]]
start = 3
"#;

fn driftkit(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_driftkit"))
        .current_dir(dir)
        .args(args)
        .env_remove("DRIFTKIT_THREADS")
        .output()
        .unwrap()
}

fn with_config(text: &str) -> TempDir {
    let dir = TempDir::new().unwrap();
    std::fs::write(dir.path().join("exp.toml"), text).unwrap();
    dir
}

fn json(out: &Output) -> Value {
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn without_wall_time(mut v: Value) -> Value {
    v["metadata"].as_object_mut().unwrap().remove("wall_time_seconds");
    v
}

fn leaves(prefix: String, v: &Value, out: &mut BTreeMap<String, Value>) {
    match v {
        Value::Object(m) => m.iter().for_each(|(k, v)| {
            leaves(if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") }, v, out)
        }),
        Value::Array(a) => a
            .iter()
            .enumerate()
            .for_each(|(i, v)| leaves(format!("{prefix}.{i}"), v, out)),
        other => {
            out.insert(prefix, other.clone());
        }
    }
}

#[test]
fn missing_config_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    assert_eq!(driftkit(dir.path(), &["verify"]).status.code(), Some(1));
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    assert_eq!(driftkit(dir.path(), &["verify", "--bogus"]).status.code(), Some(1));
    assert_eq!(driftkit(dir.path(), &[]).status.code(), Some(1));
}

#[test]
fn parse_error_reports_location() {
    let dir = with_config("[process]\nfamily = \"example1\"\nn = 5\nfoo = 1\n");
    let out = driftkit(dir.path(), &["simulate", "--config", "exp.toml"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 4"), "{err}");
}

#[test]
fn validation_error_names_the_field() {
    let dir = with_config("[process]\nfamily = \"example2\"\ndelta = 1.5\n");
    let out = driftkit(dir.path(), &["simulate", "--config", "exp.toml"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("process.delta"));
}

#[test]
fn bound_for_example3_linear_h() {
    let dir = with_config(EXAMPLE3);
    let report = json(&driftkit(dir.path(), &["bound", "--config", "exp.toml"]));
    let value = report["bounds"][0]["value"].as_f64().unwrap();
    assert!((value - (1.0 + 1000f64.ln()) / 0.1).abs() < 1e-9);
    assert!((value - 79.0776).abs() < 5e-5);
}

#[test]
fn oracle_on_unit_chain() {
    let dir = with_config(UNIT_CHAIN);
    let report = json(&driftkit(dir.path(), &["oracle", "--config", "exp.toml"]));
    let times: Vec<f64> = report["oracle"]["per_state"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    assert_eq!(times, [0.0, 1.0, 2.0, 3.0]);
}

#[test]
fn oracle_needs_a_finite_chain() {
    let dir = with_config(EXAMPLE3);
    assert_eq!(driftkit(dir.path(), &["oracle", "--config", "exp.toml"]).status.code(), Some(2));
}

#[test]
fn verify_is_deterministic_apart_from_wall_time() {
    let dir = with_config(WALK);
    let a = json(&driftkit(dir.path(), &["verify", "--config", "exp.toml"]));
    let b = json(&driftkit(dir.path(), &["verify", "--config", "exp.toml"]));
    assert_eq!(without_wall_time(a.clone()), without_wall_time(b));
    let c = json(&driftkit(dir.path(), &["verify", "--config", "exp.toml", "--seed", "10"]));
    assert_ne!(without_wall_time(a), without_wall_time(c));
}

#[test]
fn csv_and_json_carry_the_same_numbers() {
    let dir = with_config(WALK);
    let report = json(&driftkit(dir.path(), &["verify", "--config", "exp.toml"]));
    let out = driftkit(dir.path(), &["verify", "--config", "exp.toml", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let mut reader = csv::Reader::from_reader(out.stdout.as_slice());
    assert_eq!(reader.headers().unwrap(), vec!["field", "value"]);
    let rows: BTreeMap<String, String> = reader
        .records()
        .map(|r| {
            let r = r.unwrap();
            (r[0].to_string(), r[1].to_string())
        })
        .collect();
    let mut expected = BTreeMap::new();
    leaves(String::new(), &report, &mut expected);
    assert_eq!(rows.len(), expected.len());
    let mut numbers = 0;
    for (field, v) in &expected {
        if field == "metadata.wall_time_seconds" {
            continue;
        }
        let cell = &rows[field];
        match v {
            Value::Number(n) => {
                assert_eq!(cell.parse::<f64>().unwrap(), n.as_f64().unwrap(), "{field}");
                numbers += 1;
            }
            Value::Null => assert!(cell.is_empty(), "{field}"),
            Value::String(s) => assert_eq!(cell, s, "{field}"),
            other => assert_eq!(cell, &other.to_string(), "{field}"),
        }
    }
    assert!(numbers > 10);
}

#[test]
fn out_flag_writes_the_report() {
    let dir = with_config(WALK);
    let out = driftkit(dir.path(), &["simulate", "--config", "exp.toml", "--out", "report.json"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(dir.path().join("report.json")).unwrap();
    let report: Value = serde_json::from_str(&text).unwrap();
    assert!(report["estimate"]["mean"].as_f64().unwrap() > 0.0);
}

#[test]
fn dump_paths_writes_one_row_per_step() {
    let dir = with_config(EXAMPLE3);
    let out = driftkit(dir.path(), &["simulate", "--config", "exp.toml", "--dump-paths"]);
    assert_eq!(out.status.code(), Some(0));
    let mut reader = csv::Reader::from_path(dir.path().join("paths.csv")).unwrap();
    assert_eq!(reader.records().count(), 10 * 67);
}

#[test]
fn censoring_is_flagged_on_stderr() {
    let dir = with_config(&WALK.replace("max_steps = 10000", "max_steps = 8"));
    let out = driftkit(dir.path(), &["simulate", "--config", "exp.toml"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("censored"));
}

#[test]
fn all_censored_is_a_runtime_error() {
    let dir = with_config(&WALK.replace("max_steps = 10000", "max_steps = 1"));
    assert_eq!(driftkit(dir.path(), &["simulate", "--config", "exp.toml"]).status.code(), Some(3));
}

#[test]
fn counterexamples_table() {
    let dir = TempDir::new().unwrap();
    let out = driftkit(dir.path(), &["counterexamples", "--trials", "20000"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r.ends_with("PASS")));
}

#[test]
fn bad_thread_count_is_a_usage_error() {
    let dir = with_config(WALK);
    let out = Command::new(env!("CARGO_BIN_EXE_driftkit"))
        .current_dir(dir.path())
        .args(["simulate", "--config", "exp.toml"])
        .env("DRIFTKIT_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}
