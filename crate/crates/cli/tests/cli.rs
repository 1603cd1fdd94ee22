use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::{json, Value};

const FIVE_QUBITS: &str = r#"{"parts":[
    {"label":"h1","levels":["0","1"],"temperature":{"finite":"1/ln2"}},
    {"label":"h2","levels":["0","1"],"temperature":{"finite":"1/ln2"}},
    {"label":"h3","levels":["0","1"],"temperature":{"finite":"1/ln2"}},
    {"label":"c1","levels":["0","1"],"temperature":"zero"},
    {"label":"c2","levels":["0","1"],"temperature":"zero"}]}"#;

const EQUILIBRIUM: &str = r#"{"parts":[
    {"levels":["0","1","3"],"temperature":{"finite":"1/ln3"}},
    {"levels":["0","2"],"temperature":{"finite":"1/ln3"}}]}"#;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_heatcomp")).args(args).env_remove("HEATCOMP_PRECISION").output().unwrap()
}

fn ok_json(args: &[&str]) -> Value {
    let out = run(args);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn schema_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../schemas")
}

fn load_schema(name: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(schema_dir().join(name)).unwrap()).unwrap()
}

/// Validates `v` against `reports.schema.json#/$defs/<def>`.
fn assert_report(def: &str, v: &Value) {
    let mut schema = load_schema("reports.schema.json");
    schema["$ref"] = json!(format!("#/$defs/{def}"));
    let validator = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = validator.iter_errors(v).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{def}: {errors:?}\n{v:#}");
}

#[test]
fn threshold_example() {
    let out = run(&["threshold", "--hot", "3", "--cold", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v, json!({"threshold": "3/2"}));
    assert_report("threshold", &v);
    assert_report("threshold", &ok_json(&["threshold", "--hot", "3", "--cold", "2", "--ratio", "7/4"]));
}

#[test]
fn optimal_engines() {
    let v = ok_json(&["optimal", "-i", FIVE_QUBITS]);
    assert_eq!(v["gain"], "5/27");
    assert_report("optimal", &v);
    assert_eq!(ok_json(&["optimal", "-i", EQUILIBRIUM])["gain"], "0");
    let real = ok_json(&["optimal", "-i", FIVE_QUBITS, "--scalar-mode", "real:128"]);
    assert_eq!(real["exact"], false);
    let g: f64 = real["gain"].as_str().unwrap().parse().unwrap();
    assert!((g - 5.0 / 27.0).abs() < 1e-15);
}

#[test]
fn input_from_file_and_output_path() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("ens.json");
    let output = dir.path().join("report.json");
    std::fs::write(&input, FIVE_QUBITS).unwrap();
    let out = run(&["optimal", "-i", input.to_str().unwrap(), "-o", output.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&output).unwrap()).unwrap();
    assert_eq!(v["gain"], "5/27");
}

#[test]
fn ensemble_inputs_match_the_schema() {
    let schema = load_schema("ensemble.schema.json");
    let validator = jsonschema::validator_for(&schema).unwrap();
    for doc in [FIVE_QUBITS, EQUILIBRIUM] {
        assert!(validator.is_valid(&serde_json::from_str(doc).unwrap()));
    }
    assert!(!validator.is_valid(&json!({"parts": [{"levels": ["0"], "temperature": "zero"}]})));
    assert!(!validator.is_valid(&json!({"parts": [{"levels": ["0", "1"], "temperature": "warm", "extra": 1}]})));
}

#[test]
fn every_report_matches_its_schema() {
    let fig2_ens = r#"{"parts":[
        {"levels":["0","1"],"temperature":{"finite":"1/ln2"}},
        {"levels":["0","1"],"temperature":{"finite":"1/ln2"}},
        {"levels":["0","1"],"temperature":{"finite":"1/ln8"}}]}"#;
    let swap_ens = r#"{"parts":[{"levels":["0","2"],"temperature":"infinite"},{"levels":["0","1"],"temperature":"infinite"}]}"#;
    let cases: Vec<(&str, Vec<&str>)> = vec![
        ("gain", vec!["gain", "-i", FIVE_QUBITS, "--perm", &IDENTITY_32]),
        ("swap_check", vec!["swap-check", "--e-a", "1", "--t-a", "1/ln2", "--e-b", "1", "--t-b", "1/ln5"]),
        ("copies", vec!["copies", "--probs", "1/2,1/6,1/3", "--levels", "0,1,2"]),
        ("copies", vec!["copies", "--probs", "4/7,2/7,1/7", "--levels", "0,1,2", "--n-max", "4"]),
        ("circuit_search", vec!["circuit-search", "-i", fig2_ens, "--max-gates", "3", "-q"]),
        ("circuit_sim", vec!["circuit-sim", "--example", "fig2", "-i", fig2_ens]),
        ("circuit_sim", vec!["circuit-sim", "--example", "fig4-right"]),
        ("knapsack", vec!["knapsack", "--random", "6", "--seed", "9"]),
        ("knapsack", vec!["knapsack", "-i", r#"{"e_a":"10","gaps":["6","4","3"],"t_a":"2","t_b":"1"}"#]),
        ("majority", vec!["majority", "--n", "2"]),
        ("refrigerator", vec!["refrigerator", "--n", "2", "--t", "1/ln3"]),
        ("three_level", vec!["three-level"]),
        ("three_level", vec!["three-level", "--e", "4/5", "--q", "5/2"]),
        ("oscillator", vec!["oscillator", "sqrt", "--cutoff", "30"]),
        ("oscillator", vec!["oscillator", "sqrt", "--n", "17", "--cutoff", "30"]),
        ("oscillator", vec!["oscillator", "square", "--n", "3", "--m", "2"]),
        ("oscillator", vec!["oscillator", "root-k", "--k", "3", "--cutoff", "20"]),
        ("oscillator", vec!["oscillator", "power-k", "--k", "3", "--max-total", "4"]),
        ("convert_base", vec!["convert-base", "--value", "7", "--n-a", "4", "--n-b", "3"]),
        ("embed", vec!["embed", "-i", swap_ens, "--perm", "0,2,1,3"]),
        ("embed", vec!["embed", "-i", fig2_ens, "--widths", "16,64"]),
    ];
    for (def, args) in cases {
        assert_report(def, &ok_json(&args));
    }
}

static IDENTITY_32: std::sync::LazyLock<String> =
    std::sync::LazyLock::new(|| (0..32).map(|i| i.to_string()).collect::<Vec<_>>().join(","));

#[test]
fn reports_are_deterministic() {
    let args = ["knapsack", "--random", "8", "--seed", "42"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
    let other = run(&["knapsack", "--random", "8", "--seed", "43"]).stdout;
    assert_ne!(run(&args).stdout, other);
    let flow = ["flow-dot", "--e", "sqrt2", "--q", "sqrt3", "--window", "12", "-q"];
    assert_eq!(run(&flow).stdout, run(&flow).stdout);
}

#[test]
fn flow_dot_matches_the_flow_report() {
    let dir = tempfile::tempdir().unwrap();
    let dot = dir.path().join("flow.dot");
    let report = dir.path().join("flow.json");
    let out = run(&[
        "flow-dot", "--e", "sqrt2", "--q", "sqrt3", "--window", "12", "-o", dot.to_str().unwrap(), "--report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let dot = std::fs::read_to_string(dot).unwrap();
    let v: Value = serde_json::from_str(&std::fs::read_to_string(report).unwrap()).unwrap();
    assert_report("flow", &v);
    assert!(dot.starts_with("digraph flow {\n"));
    assert_eq!(dot.matches(" -> ").count() as u64, v["moving"].as_u64().unwrap());
    assert_eq!(dot.matches("[pos=").count(), 144);

    let empty = run(&["flow-dot", "--window", "0"]);
    assert_eq!(String::from_utf8(empty.stdout).unwrap(), "digraph flow {\n  node [shape=point];\n}\n");
    let identity = run(&["flow-dot", "--e", "3/2", "--q", "3/2", "--window", "5"]);
    assert!(!String::from_utf8(identity.stdout).unwrap().contains("->"));
}

#[test]
fn exit_codes() {
    // Precondition violations and malformed input exit with 2.
    for args in [
        vec!["optimal", "-i", "{"],
        vec!["optimal"],
        vec!["threshold", "--hot", "0", "--cold", "2"],
        vec!["majority", "--n", "9"],
        vec!["refrigerator", "--n", "1", "--t", "infinite"],
        vec!["three-level", "--e", "1/2", "--q", "3"],
        vec!["convert-base", "--value", "99", "--n-a", "4", "--n-b", "3"],
        vec!["gain", "-i", FIVE_QUBITS, "--perm", "0,1"],
        vec!["optimal", "-i", FIVE_QUBITS, "--scalar-mode", "float"],
        vec!["no-such-command"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn precision_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_heatcomp"))
        .args(["flow-dot", "--window", "2", "--report", "/dev/stdout", "-o", "/dev/null", "-q"])
        .env("HEATCOMP_PRECISION", "64")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let digits = v["e"].as_str().unwrap().len();
    assert!(digits < 30, "64-bit sqrt2 prints about 20 digits, got {}", v["e"]);
}
