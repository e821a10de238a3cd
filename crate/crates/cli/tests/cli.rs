use std::fs;
use std::process::{Command, Output};

fn qccd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qccd"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn run_prints_table() {
    let out = qccd(&["run", "--bench", "BV:16", "--variant", "BASE", "--variant", "HP+SAM"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("BV-16") && l.contains("HP+SAM")));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn run_writes_outputs_and_traces() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let out = qccd(&[
        "run",
        "--bench",
        "HAM:8",
        "--seed",
        "5",
        "--trace",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for f in [
        "report.json",
        "cells.csv",
        "perf.csv",
        "fidelity.csv",
        "ablation.csv",
        "ports.csv",
    ] {
        assert!(out_dir.join(f).exists(), "{f}");
    }
    assert!(out_dir.join("trace_HAM-8_HP-SAM.txt").exists());
}

#[test]
fn json_output_is_deterministic() {
    let args = ["run", "--bench", "QAO:16", "--seed", "9", "--json"];
    let a = qccd(&args);
    let b = qccd(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["cells"].as_array().unwrap().len(), 4);
}

#[test]
fn sweep_and_ablate() {
    let out = qccd(&["sweep-ports", "--bench", "ADD:16", "--ports", "64,32"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("P64") && text.contains("P32"));

    let out = qccd(&["ablate", "--bench", "RAN:16"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().next().unwrap().contains("crossings"));
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn errors_are_json_with_nonzero_exit() {
    for args in [
        vec!["run", "--bench", "XYZ:16"],
        vec!["run", "--bench", "BV"],
        vec!["run", "--variant", "FAST"],
        vec!["sweep-ports", "--bench", "BV:16", "--ports", "12"],
        vec!["run", "--arch", "moon"],
    ] {
        let out = qccd(&args);
        assert!(!out.status.success(), "{args:?}");
        let v: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
        assert!(v["error"].is_string(), "{args:?}");
    }
}

#[test]
fn validate_config_files() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("exp.json");
    fs::write(
        &good,
        r#"{"benchmarks": [{"name": "BV", "qubits": 16}], "root_seed": 3}"#,
    )
    .unwrap();
    let out = qccd(&["validate-config", good.to_str().unwrap()]);
    assert!(out.status.success());

    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"sigma": -1}"#).unwrap();
    assert!(!qccd(&["validate-config", bad.to_str().unwrap()]).status.success());

    let hw = dir.path().join("hw.toml");
    fs::write(&hw, include_str!("../../core/presets/desk-switched.toml")).unwrap();
    let out = qccd(&["validate-config", hw.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().contains("1865"));

    let out = qccd(&["run", "--config", good.to_str().unwrap(), "--variant", "SWITCH"]);
    assert!(out.status.success());
}
