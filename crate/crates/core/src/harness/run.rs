use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    derive_seed, ExperimentConfig, HarnessError, LatencyModeChoice, MappingStage, QccdPartition, SeedStream, Stages,
    Variant,
};
use crate::arch::Hardware;
use crate::circuit::{time_slice, Circuit};
use crate::graph::{build_lookahead_graph, LookaheadConfig, QubitGraph};
use crate::partition::{
    hierarchical_partition, natural_map, natural_order_tree, switch_aware_map, MappingAssignment, PartitionConfig,
    SubInit,
};
use crate::sim::{simulate, ExecutionReport, LatencyMode, PhysicalOp, SimOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportKind {
    /// One column per pipeline variant.
    Variants,
    /// One column per module port count.
    Ports,
}

/// One benchmark run through one pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub benchmark: String,
    pub qubits: usize,
    /// Variant name, or `P<ports>` in a port sweep.
    pub column: String,
    pub variant: Variant,
    pub ports: Option<u32>,
    pub hardware: String,
    pub t2_us: f64,
    pub stages: Stages,
    pub bench_seed: u64,
    pub report: Option<ExecutionReport>,
    pub error: Option<String>,
    pub normalized_latency: Option<f64>,
    pub normalized_fidelity: Option<f64>,
    #[serde(skip)]
    pub ops: Vec<PhysicalOp>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub kind: ReportKind,
    pub normalize_to: String,
    pub columns: Vec<String>,
    pub cells: Vec<Cell>,
    pub notes: Vec<String>,
}

impl ComparisonReport {
    pub fn cell(&self, benchmark: &str, column: &str) -> Option<&Cell> {
        self.cells
            .iter()
            .find(|c| c.benchmark == benchmark && c.column == column)
    }

    /// Benchmark names in config order, deduplicated.
    pub fn benchmarks(&self) -> Vec<(String, usize)> {
        let mut out: Vec<(String, usize)> = Vec::new();
        for c in &self.cells {
            if !out.iter().any(|(b, q)| b == &c.benchmark && *q == c.qubits) {
                out.push((c.benchmark.clone(), c.qubits));
            }
        }
        out
    }
}

const CADENCE_NOTE: &str = "every variant, BASE included, uses one static mapping computed from the slice-0 lookahead graph; no per-slice repartitioning";

impl ExperimentConfig {
    /// Stages a variant runs under this config.
    pub fn stages(&self, variant: Variant) -> Stages {
        let mut s = variant.stages();
        if self.comm_seeded_init
            && s.mapping == MappingStage::SwitchAware
            && s.qccd_partition == QccdPartition::Hierarchical
        {
            s.qccd_partition = QccdPartition::HierarchicalCommSeeded;
        }
        s
    }
}

fn partition_config(hw: &Hardware, cfg: &ExperimentConfig) -> PartitionConfig {
    let arch = &hw.arch;
    let j = arch.modules().iter().map(|m| m.data_qccds().len()).min().unwrap_or(0);
    let capacity = arch
        .modules()
        .iter()
        .flat_map(|m| m.data_qccds().into_iter().map(|q| m.qccds[q].data_capacity))
        .min()
        .unwrap_or(0);
    PartitionConfig {
        k: arch.module_count(),
        j,
        p: cfg.p,
        q: cfg.q,
        capacity,
    }
}

/// Static mapping of `circuit` for one pipeline.
pub fn compile(
    circuit: &Circuit,
    hw: &Hardware,
    stages: &Stages,
    cfg: &ExperimentConfig,
    init_seed: u64,
) -> Result<MappingAssignment, String> {
    let n = circuit.qubit_count();
    let slices = time_slice(circuit);
    let graph = if slices.is_empty() {
        QubitGraph::new(n)
    } else {
        let la = LookaheadConfig::with_sigma(cfg.sigma, slices.len()).map_err(|e| e.to_string())?;
        build_lookahead_graph(n, &slices, 0, &la).map_err(|e| e.to_string())?
    };
    let pcfg = partition_config(hw, cfg);
    let tree = match stages.qccd_partition {
        QccdPartition::Natural => natural_order_tree(&graph, &pcfg),
        QccdPartition::Hierarchical => hierarchical_partition(&graph, &pcfg, &SubInit::Bisection),
        QccdPartition::HierarchicalCommSeeded => {
            let seed_groups = hw.arch.module(0).port_qccds().len();
            let init = SubInit::CommSeeded {
                seed_groups,
                rng_seed: init_seed,
            };
            hierarchical_partition(&graph, &pcfg, &init)
        }
    }
    .map_err(|e| e.to_string())?;
    match stages.mapping {
        MappingStage::Natural => natural_map(&tree, &hw.arch),
        MappingStage::SwitchAware => switch_aware_map(&tree, &hw.arch),
    }
    .map_err(|e| e.to_string())
}

struct Job<'a> {
    bench: usize,
    column: String,
    variant: Variant,
    ports: Option<u32>,
    hw: &'a Hardware,
}

/// Compiles and simulates one benchmark; failures land in `Cell::error`.
pub fn run_cell(
    cfg: &ExperimentConfig,
    bench: usize,
    circuit: &Result<Circuit, String>,
    hw: &Hardware,
    variant: Variant,
) -> (Option<ExecutionReport>, Option<String>, Vec<PhysicalOp>) {
    let result = circuit.as_ref().map_err(Clone::clone).and_then(|circuit| {
        let stages = cfg.stages(variant);
        let init_seed = derive_seed(cfg.root_seed, SeedStream::Init, bench as u64);
        let mapping = compile(circuit, hw, &stages, cfg, init_seed)?;
        let latency_mode = match cfg.latency_mode {
            LatencyModeChoice::Expected => LatencyMode::Expected,
            LatencyModeChoice::Sampled => LatencyMode::Sampled {
                seed: derive_seed(cfg.root_seed, SeedStream::Sampling, bench as u64),
            },
        };
        let options = SimOptions {
            latency_mode,
            check_invariants: true,
        };
        simulate(circuit, &mapping, hw, &options).map_err(|e| e.to_string())
    });
    match result {
        Ok(exec) => (Some(exec.report), None, exec.ops),
        Err(e) => (None, Some(e), Vec::new()),
    }
}

fn generate_all(cfg: &ExperimentConfig) -> Vec<Result<Circuit, String>> {
    cfg.benchmarks
        .iter()
        .enumerate()
        .map(|(i, b)| b.name.generate(b.qubits, cfg.bench_seed(i)).map_err(|e| e.to_string()))
        .collect()
}

fn execute(cfg: &ExperimentConfig, circuits: &[Result<Circuit, String>], jobs: Vec<Job<'_>>) -> Vec<Cell> {
    jobs.into_par_iter()
        .map(|job| {
            let spec = &cfg.benchmarks[job.bench];
            let (report, error, ops) = run_cell(cfg, job.bench, &circuits[job.bench], job.hw, job.variant);
            Cell {
                benchmark: spec.name.name().to_string(),
                qubits: spec.qubits,
                column: job.column,
                variant: job.variant,
                ports: job.ports,
                hardware: job.hw.name.clone(),
                t2_us: job.hw.calibration.t2_us,
                stages: cfg.stages(job.variant),
                bench_seed: cfg.bench_seed(job.bench),
                report,
                error,
                normalized_latency: None,
                normalized_fidelity: None,
                ops,
            }
        })
        .collect()
}

fn normalize(cells: &mut [Cell], base_column: &str) {
    let bases: Vec<Option<(f64, f64)>> = cells
        .iter()
        .map(|c| {
            cells
                .iter()
                .find(|b| b.benchmark == c.benchmark && b.qubits == c.qubits && b.column == base_column)
                .and_then(|b| b.report.as_ref())
                .map(|r| (r.latency_us, r.fidelity))
        })
        .collect();
    for (cell, base) in cells.iter_mut().zip(bases) {
        if let (Some(r), Some((lat, fid))) = (cell.report.as_ref(), base) {
            cell.normalized_latency = (lat > 0.0).then(|| r.latency_us / lat);
            cell.normalized_fidelity = (fid > 0.0).then(|| r.fidelity / fid);
        }
    }
}

/// Every (benchmark, variant) cell, ordered by benchmark then variant.
/// Writes outputs when `out_dir` is set.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ComparisonReport, HarnessError> {
    cfg.validate()?;
    if !cfg.variants.contains(&cfg.normalize_to) {
        return Err(HarnessError::Config(format!(
            "normalization base {} is not among the selected variants",
            cfg.normalize_to
        )));
    }
    let base = cfg.hardware(super::HardwareRole::Base)?;
    let switched = cfg.hardware(super::HardwareRole::Switched)?;
    let circuits = generate_all(cfg);
    let mut jobs = Vec::new();
    for bench in 0..cfg.benchmarks.len() {
        for &variant in &cfg.variants {
            let hw = match variant.stages().hardware {
                super::HardwareRole::Base => &base,
                super::HardwareRole::Switched => &switched,
            };
            jobs.push(Job {
                bench,
                column: variant.name().to_string(),
                variant,
                ports: None,
                hw,
            });
        }
    }
    let mut cells = execute(cfg, &circuits, jobs);
    normalize(&mut cells, cfg.normalize_to.name());
    let report = ComparisonReport {
        kind: ReportKind::Variants,
        normalize_to: cfg.normalize_to.name().to_string(),
        columns: cfg.variants.iter().map(|v| v.name().to_string()).collect(),
        cells,
        notes: vec![CADENCE_NOTE.to_string()],
    };
    if let Some(dir) = &cfg.out_dir {
        super::write_outputs(&report, dir, cfg.trace)?;
    }
    Ok(report)
}

/// One cell per (benchmark, port count) on the switched-role hardware. Each
/// count keeps the switch size at `sweep_switch_ports` and runs
/// `ports / 8` attempts in flight. Normalized to the largest port count.
pub fn sweep_ports(cfg: &ExperimentConfig, port_counts: &[u32]) -> Result<ComparisonReport, HarnessError> {
    cfg.validate()?;
    if port_counts.is_empty() {
        return Err(HarnessError::Config("no port counts given".into()));
    }
    let switched = cfg.hardware(super::HardwareRole::Switched)?;
    let budget = switched.arch.modules().iter().map(|m| m.ports).min().unwrap_or(0);
    let mut machines = Vec::new();
    for &p in port_counts {
        if p == 0 || p % 8 != 0 || p > budget {
            return Err(HarnessError::Config(format!(
                "port count {p} must be a positive multiple of 8 no larger than {budget}"
            )));
        }
        machines.push(switched.with_ports(p, cfg.sweep_switch_ports, p / 8)?);
    }
    let circuits = generate_all(cfg);
    let mut jobs = Vec::new();
    for bench in 0..cfg.benchmarks.len() {
        for (i, &p) in port_counts.iter().enumerate() {
            jobs.push(Job {
                bench,
                column: format!("P{p}"),
                variant: cfg.sweep_variant,
                ports: Some(p),
                hw: &machines[i],
            });
        }
    }
    let mut cells = execute(cfg, &circuits, jobs);
    let top = format!("P{}", port_counts.iter().max().unwrap());
    normalize(&mut cells, &top);
    let mut columns: Vec<String> = Vec::new();
    for &p in port_counts {
        let c = format!("P{p}");
        if !columns.contains(&c) {
            columns.push(c);
        }
    }
    let report = ComparisonReport {
        kind: ReportKind::Ports,
        normalize_to: top,
        columns,
        cells,
        notes: vec![CADENCE_NOTE.to_string()],
    };
    if let Some(dir) = &cfg.out_dir {
        super::write_outputs(&report, dir, cfg.trace)?;
    }
    Ok(report)
}
