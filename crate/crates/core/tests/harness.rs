#![allow(clippy::field_reassign_with_default)]

use std::fs;

use qccd::arch::Hardware;
use qccd::circuit::{Benchmark, Circuit, Gate};
use qccd::harness::{
    read_cells_csv, run_experiment, sweep_ports, BenchSpec, CsvCell, ExperimentConfig, HarnessError, ReportKind,
    Variant, PLOT_FILES,
};
use qccd::partition::{MappingAssignment, Placement};
use qccd::sim::{estimate_fidelity, parse_trace, simulate, OpKind, SimOptions};

fn bench(name: Benchmark, qubits: usize) -> BenchSpec {
    BenchSpec {
        name,
        qubits,
        seed: None,
    }
}

#[test]
fn bv16_two_variants() {
    let mut cfg = ExperimentConfig::default();
    cfg.benchmarks = vec![bench(Benchmark::Bv, 16)];
    cfg.variants = vec![Variant::Base, Variant::HpSam];
    cfg.normalize_to = Variant::Base;
    let r = run_experiment(&cfg).unwrap();
    assert_eq!(r.cells.len(), 2);
    assert_eq!(r.columns, vec!["BASE", "HP+SAM"]);
    let base = r.cell("BV", "BASE").unwrap();
    let sam = r.cell("BV", "HP+SAM").unwrap();
    assert_eq!(base.normalized_latency, Some(1.0));
    let ratio = sam.report.as_ref().unwrap().latency_us / base.report.as_ref().unwrap().latency_us;
    assert_eq!(sam.normalized_latency, Some(ratio));
    assert!(ratio < 1.0);
    // Anchors recorded on the first run.
    assert_eq!(base.report.as_ref().unwrap().latency_us, 128_245.0);
    assert_eq!(sam.report.as_ref().unwrap().latency_us, 54_865.0);
    assert_eq!(run_experiment(&cfg).unwrap(), r);
}

#[test]
fn empty_benchmark_list() {
    let r = run_experiment(&ExperimentConfig::default()).unwrap();
    assert!(r.cells.is_empty());
    assert_eq!(r.kind, ReportKind::Variants);
    assert!(!r.notes.is_empty());
}

#[test]
fn missing_normalization_base_is_rejected() {
    let mut cfg = ExperimentConfig::default();
    cfg.variants = vec![Variant::Hp];
    assert!(matches!(run_experiment(&cfg), Err(HarnessError::Config(_))));
}

#[test]
fn oversized_benchmark_fails_only_its_cells() {
    let mut cfg = ExperimentConfig::default();
    cfg.benchmarks = vec![bench(Benchmark::Ham, 200), bench(Benchmark::Ham, 8)];
    let r = run_experiment(&cfg).unwrap();
    assert_eq!(r.cells.len(), 8);
    assert!(r.cells[..4].iter().all(|c| c.error.is_some() && c.report.is_none()));
    assert!(r.cells[4..].iter().all(|c| c.report.is_some()));
}

#[test]
fn single_entanglement_tracks_table_anchors() {
    let c = Circuit::from_gates(2, vec![Gate::two("cx", 0, 1)]).unwrap();
    let mut durations = Vec::new();
    for preset in ["baseline", "switched"] {
        let hw = Hardware::preset(preset).unwrap();
        let mapping = MappingAssignment::new(vec![
            Placement {
                module: 0,
                qccd: 0,
                slot: 0,
            },
            Placement {
                module: 1,
                qccd: 0,
                slot: 0,
            },
        ])
        .unwrap();
        let exec = simulate(&c, &mapping, &hw, &SimOptions::default()).unwrap();
        let ent: Vec<_> = exec.ops.iter().filter(|o| o.kind == OpKind::Entangle).collect();
        assert_eq!(ent.len(), 1);
        durations.push(ent[0].duration_us);
    }
    assert_eq!(durations, vec![7980.0, 1865.0]);
    assert_eq!(durations[1] / durations[0], 1865.0 / 7980.0);
}

#[test]
fn port_sweep_shapes() {
    let mut cfg = ExperimentConfig::default();
    cfg.benchmarks = vec![bench(Benchmark::Qao, 16)];
    let one = sweep_ports(&cfg, &[32]).unwrap();
    assert_eq!(one.cells.len(), 1);
    assert_eq!(one.cells[0].normalized_latency, Some(1.0));
    assert_eq!(one.normalize_to, "P32");

    let twice = sweep_ports(&cfg, &[64, 64]).unwrap();
    assert_eq!(twice.cells.len(), 2);
    assert_eq!(twice.cells[0].report, twice.cells[1].report);

    for bad in [0, 12, 72] {
        assert!(
            matches!(sweep_ports(&cfg, &[bad]), Err(HarnessError::Config(_))),
            "{bad}"
        );
    }
    assert!(sweep_ports(&cfg, &[]).is_err());

    let full = sweep_ports(&cfg, &[64, 48, 32, 16]).unwrap();
    assert_eq!(full.kind, ReportKind::Ports);
    let lat: Vec<f64> = full
        .cells
        .iter()
        .map(|c| c.report.as_ref().unwrap().latency_us)
        .collect();
    assert!(lat.windows(2).all(|w| w[1] >= w[0]), "{lat:?}");
}

#[test]
fn outputs_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::default();
    cfg.benchmarks = vec![
        bench(Benchmark::Bv, 16),
        bench(Benchmark::Add, 16),
        bench(Benchmark::Ran, 16),
    ];
    cfg.variants = vec![Variant::Switch, Variant::HpSam];
    cfg.out_dir = Some(dir.path().to_path_buf());
    cfg.trace = true;
    let r = run_experiment(&cfg).unwrap();

    for f in PLOT_FILES.iter().chain(["report.json", "cells.csv"].iter()) {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let perf = fs::read_to_string(dir.path().join("perf.csv")).unwrap();
    let lines: Vec<&str> = perf.lines().collect();
    assert_eq!(lines[0], "benchmark,qubits,SWITCH,HP+SAM");
    assert_eq!(lines.len(), 4);
    assert!(lines[1..].iter().all(|l| l.split(',').nth(2) == Some("1.0")));
    let ports = fs::read_to_string(dir.path().join("ports.csv")).unwrap();
    assert_eq!(ports.lines().count(), 1);

    let rows = read_cells_csv(&dir.path().join("cells.csv")).unwrap();
    let expect: Vec<CsvCell> = r.cells.iter().map(CsvCell::from).collect();
    assert_eq!(rows, expect);

    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(json["cells"].as_array().unwrap().len(), 6);

    let table = qccd::arch::CalibrationTable::default();
    for c in &r.cells {
        let name = format!("trace_{}-{}_{}.txt", c.benchmark, c.qubits, c.column.replace('+', "-"));
        let (h, ops) = parse_trace(&fs::read_to_string(dir.path().join(&name)).unwrap()).unwrap();
        let rep = c.report.as_ref().unwrap();
        assert_eq!(
            ops.iter().filter(|o| o.kind == OpKind::MatterLink).count(),
            rep.matter_link_crossings
        );
        assert_eq!(estimate_fidelity(&ops, h.makespan_us, h.qubits, &table), rep.fidelity);
        assert_eq!(ops.iter().map(|o| o.raw_pairs).sum::<u64>(), rep.raw_pairs);
    }
}

#[test]
fn write_failure_names_path() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let mut cfg = ExperimentConfig::default();
    cfg.benchmarks = vec![bench(Benchmark::Ham, 8)];
    cfg.out_dir = Some(blocker.join("out"));
    match run_experiment(&cfg) {
        Err(HarnessError::Io { path, .. }) => assert!(path.starts_with(&blocker)),
        other => panic!("expected io error, got {other:?}"),
    }
}
