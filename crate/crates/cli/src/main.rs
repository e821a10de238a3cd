use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qccd::arch::Hardware;
use qccd::circuit::Benchmark;
use qccd::harness::{run_experiment, sweep_ports, BenchSpec, ComparisonReport, ExperimentConfig, Variant};

#[derive(Parser)]
#[command(
    name = "qccd",
    about = "Run partitioning and mapping experiments on networked QCCD machines"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every benchmark through each selected variant.
    Run(Common),
    /// Sweep per-module port counts on the switched-role machine.
    SweepPorts {
        #[command(flatten)]
        common: Common,
        /// Comma-separated port counts.
        #[arg(long, value_delimiter = ',')]
        ports: Vec<u32>,
    },
    /// Run all four variants and report matter-link crossings.
    Ablate(Common),
    /// Check an experiment config (JSON) or hardware file (TOML).
    ValidateConfig { path: PathBuf },
}

#[derive(Args)]
struct Common {
    /// Experiment config (JSON).
    #[arg(long)]
    config: Option<PathBuf>,
    /// `desk` or `full`.
    #[arg(long)]
    arch: Option<String>,
    /// Benchmark as NAME:QUBITS, e.g. BV:16. Repeatable.
    #[arg(long = "bench")]
    benches: Vec<String>,
    /// Root seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Variant to run. Repeatable.
    #[arg(long = "variant")]
    variants: Vec<String>,
    /// Write one trace file per cell (needs --out).
    #[arg(long)]
    trace: bool,
    /// Print the full report as JSON instead of a table.
    #[arg(long)]
    json: bool,
}

fn parse_bench(s: &str) -> Result<BenchSpec, String> {
    let (name, qubits) = s
        .split_once(':')
        .ok_or_else(|| format!("benchmark `{s}` must look like NAME:QUBITS"))?;
    let name: Benchmark = serde_json::from_value(serde_json::Value::String(name.to_ascii_uppercase()))
        .map_err(|_| format!("unknown benchmark `{name}`"))?;
    let qubits = qubits.parse().map_err(|_| format!("bad qubit count in `{s}`"))?;
    Ok(BenchSpec {
        name,
        qubits,
        seed: None,
    })
}

fn build_config(c: &Common) -> Result<ExperimentConfig, String> {
    let mut cfg = match &c.config {
        Some(p) => ExperimentConfig::load(p).map_err(|e| e.to_string())?,
        None => ExperimentConfig::default(),
    };
    if let Some(a) = &c.arch {
        cfg.arch = a.clone();
    }
    if !c.benches.is_empty() {
        cfg.benchmarks = c.benches.iter().map(|b| parse_bench(b)).collect::<Result<_, _>>()?;
    }
    if let Some(s) = c.seed {
        cfg.root_seed = s;
    }
    if let Some(o) = &c.out {
        cfg.out_dir = Some(o.clone());
    }
    if !c.variants.is_empty() {
        cfg.variants = c.variants.iter().map(|v| v.parse()).collect::<Result<_, _>>()?;
        if !cfg.variants.contains(&cfg.normalize_to) {
            cfg.normalize_to = cfg.variants[0];
        }
    }
    cfg.trace |= c.trace;
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

fn fmt_opt(v: Option<f64>, digits: usize) -> String {
    v.map_or("-".into(), |x| format!("{x:.digits$}"))
}

fn print_table(report: &ComparisonReport, crossings: bool) {
    println!(
        "{:<10} {:<8} {:>14} {:>10} {:>10} {:>10} {:>9}",
        "bench",
        "column",
        "latency_us",
        "norm_lat",
        "fidelity",
        "norm_fid",
        if crossings { "crossings" } else { "remote" }
    );
    for c in &report.cells {
        let bench = format!("{}-{}", c.benchmark, c.qubits);
        match &c.report {
            Some(r) => println!(
                "{:<10} {:<8} {:>14.1} {:>10} {:>10.6} {:>10} {:>9}",
                bench,
                c.column,
                r.latency_us,
                fmt_opt(c.normalized_latency, 4),
                r.fidelity,
                fmt_opt(c.normalized_fidelity, 4),
                if crossings {
                    r.matter_link_crossings
                } else {
                    r.remote_gates
                }
            ),
            None => println!(
                "{:<10} {:<8} error: {}",
                bench,
                c.column,
                c.error.as_deref().unwrap_or("unknown")
            ),
        }
    }
}

fn emit(report: &ComparisonReport, json: bool, crossings: bool) -> Result<(), String> {
    if json {
        println!("{}", serde_json::to_string_pretty(report).map_err(|e| e.to_string())?);
    } else {
        print_table(report, crossings);
    }
    Ok(())
}

fn validate_file(path: &Path) -> Result<String, String> {
    if path.extension().is_some_and(|e| e == "toml") {
        let hw = Hardware::load(path).map_err(|e| e.to_string())?;
        Ok(format!(
            "hardware `{}`: {} modules, entanglement latency {} us",
            hw.name,
            hw.arch.module_count(),
            hw.entanglement_latency().map_err(|e| e.to_string())?
        ))
    } else {
        let cfg = ExperimentConfig::load(path).map_err(|e| e.to_string())?;
        for v in [
            cfg.hardware(qccd::harness::HardwareRole::Base),
            cfg.hardware(qccd::harness::HardwareRole::Switched),
        ] {
            v.map_err(|e| e.to_string())?;
        }
        Ok(format!(
            "experiment config: {} benchmarks, {} variants",
            cfg.benchmarks.len(),
            cfg.variants.len()
        ))
    }
}

fn dispatch(cli: Cli) -> Result<(), String> {
    match cli.command {
        Command::Run(c) => {
            let cfg = build_config(&c)?;
            let report = run_experiment(&cfg).map_err(|e| e.to_string())?;
            emit(&report, c.json, false)
        }
        Command::Ablate(c) => {
            let mut cfg = build_config(&c)?;
            cfg.variants = Variant::ALL.to_vec();
            cfg.normalize_to = Variant::Base;
            let report = run_experiment(&cfg).map_err(|e| e.to_string())?;
            emit(&report, c.json, true)
        }
        Command::SweepPorts { common, ports } => {
            let cfg = build_config(&common)?;
            let ports = if ports.is_empty() {
                cfg.sweep_ports.clone()
            } else {
                ports
            };
            let report = sweep_ports(&cfg, &ports).map_err(|e| e.to_string())?;
            emit(&report, common.json, false)
        }
        Command::ValidateConfig { path } => {
            println!("{}", validate_file(&path)?);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(message) => {
            eprintln!("{}", serde_json::json!({ "error": message }));
            ExitCode::from(2)
        }
    }
}
