//! The binary end to end: exit codes, output shapes and the output directory.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyperkernel")).args(args).env_remove("HYPERKERNEL_OUT_DIR").output().unwrap()
}

/// The JSON value with every leaf replaced by its type and arrays cut to one element.
fn shape(v: &Value) -> Value {
    match v {
        Value::Null => "null".into(),
        Value::Bool(_) => "bool".into(),
        Value::Number(_) => "number".into(),
        Value::String(_) => "string".into(),
        Value::Array(a) => Value::Array(a.first().map(shape).into_iter().collect()),
        Value::Object(m) => Value::Object(m.iter().map(|(k, v)| (k.clone(), shape(v))).collect()),
    }
}

fn golden(name: &str, v: &Value) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    let actual = serde_json::to_string_pretty(&shape(v)).unwrap() + "\n";
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &actual).unwrap();
    }
    let expected = std::fs::read_to_string(&path).unwrap();
    assert_eq!(actual, expected, "shape of {name} changed");
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn measure_rows_sum_to_one() {
    let out = run(&["measure", "--n", "2", "--z", "0.5", "--zp", "0.3333333333"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = stdout_json(&out);
    let total: f64 = doc["rows"].as_array().unwrap().iter().map(|r| r["value"].as_f64().unwrap()).sum();
    assert!((total - 1.0).abs() <= 1e-12);
    assert_eq!(doc["rows"][0]["parts"], serde_json::json!([2]));
    golden("measure.json", &doc);
}

#[test]
fn kernel_csv_is_symmetric() {
    let out = run(&["kernel", "--block", "++", "--trunc", "5", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 6);
    assert_eq!(lines[0], "k,0,1,2,3,4");
    let m: Vec<Vec<f64>> = lines[1..].iter().map(|l| l.split(',').skip(1).map(|x| x.parse().unwrap()).collect()).collect();
    for i in 0..5 {
        assert_eq!(m[i].len(), 5);
        for j in 0..5 {
            assert_eq!(m[i][j], m[j][i]);
        }
    }
}

#[test]
fn kernel_json_shape_and_precision() {
    let out = run(&["kernel", "--block", "+-", "--trunc", "3", "--z", "0.5+1.5i", "--xi", "0.3"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = stdout_json(&out);
    assert_eq!(doc["block"], "+-");
    golden("kernel.json", &doc);
    // full-precision round trip against the library
    let gp = hyperkernel::GrandParams::new(hyperkernel::ZParams::conjugate_pair(0.5, 1.5).unwrap(), 0.3).unwrap();
    let v = hyperkernel::HyperKernel::new(gp).block_entry(hyperkernel::Block::PM, 1, 2).unwrap();
    assert_eq!(doc["entries"][1][2].as_f64().unwrap(), v);
}

#[test]
fn verify_identities_passes() {
    let out = run(&["verify", "--suite", "identities", "--z", "0.5", "--zp", "0.3333333333", "--xi", "0.2"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = stdout_json(&out);
    assert_eq!(doc["pass"], true);
    golden("report.json", &doc);
}

#[test]
fn verify_writes_into_the_output_directory() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_hyperkernel"))
        .args(["verify", "--suite", "fredholm", "--xi", "0.3"])
        .env("HYPERKERNEL_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let written = std::fs::read_to_string(dir.path().join("verify-fredholm.json")).unwrap();
    let doc: Value = serde_json::from_str(&written).unwrap();
    assert_eq!(doc["suite"], "fredholm");
}

#[test]
fn failing_verification_exits_one() {
    // the scaling errors cannot drop below 1e-6 at these xi
    let out = run(&["scaling", "--xi", "0.9,0.99", "--tol", "1e-6"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout_json(&out)["pass"], false);
}

#[test]
fn parameter_errors_exit_two_with_rules() {
    let out = run(&["measure", "--n", "3", "--z", "0.5", "--zp", "1.5"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("common interval"));
    assert!(err.contains("admissible (z, z') pairs"));
    assert_eq!(run(&["kernel", "--xi", "1.5"]).status.code(), Some(2));
    assert_eq!(run(&["kernel", "--block", "+x"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--suite", "nope"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["measure", "--z", "0,5", "--zp", "0.3", "--n", "2"]).status.code(), Some(2));
}

#[test]
fn sample_is_deterministic() {
    let a = run(&["sample", "--seed", "5", "--count", "200", "--xi", "0.5"]);
    let b = run(&["sample", "--seed", "5", "--count", "200", "--xi", "0.5"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let lines: Vec<Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 201);
    assert_eq!(lines[0]["rng"], "ChaCha8");
    golden("sample_header.json", &lines[0]);
    golden("sample_draw.json", &lines[1]);
}

#[test]
fn meixner_matrix_has_trace_n() {
    let out = run(&["meixner", "--n", "2", "--alpha", "0.5", "--xi", "0.4", "--trunc", "80"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = stdout_json(&out);
    let trace: f64 = (0..80).map(|i| doc["entries"][i][i].as_f64().unwrap()).sum();
    assert!((trace - 2.0).abs() < 1e-8);
}

#[test]
fn help_describes_each_subcommand() {
    for sub in ["measure", "kernel", "verify", "sample", "meixner", "scaling"] {
        let out = run(&[sub, "--help"]);
        assert_eq!(out.status.code(), Some(0));
        assert!(!out.stdout.is_empty());
    }
    let out = run(&["--help"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("L(1+L)^-1"));
}
