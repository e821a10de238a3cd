//! Experiment orchestration: benchmark cells, pipeline variants, port sweeps
//! and report emission.

mod output;
mod run;

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arch::{ArchError, Hardware};
use crate::circuit::Benchmark;

pub use output::{emit_plot_data, read_cells_csv, write_outputs, CsvCell, PLOT_FILES};
pub use run::{compile, run_cell, run_experiment, sweep_ports, Cell, ComparisonReport, ReportKind};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config: {0}")]
    Config(String),
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error(transparent)]
    Arch(#[from] ArchError),
}

impl HarnessError {
    pub(crate) fn io(path: &Path, e: impl fmt::Display) -> Self {
        HarnessError::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        }
    }
}

/// Compilation and hardware pipeline variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Variant {
    #[serde(rename = "BASE")]
    Base,
    #[serde(rename = "SWITCH")]
    Switch,
    #[serde(rename = "HP")]
    Hp,
    #[serde(rename = "HP+SAM")]
    HpSam,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::Base, Variant::Switch, Variant::Hp, Variant::HpSam];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Base => "BASE",
            Variant::Switch => "SWITCH",
            Variant::Hp => "HP",
            Variant::HpSam => "HP+SAM",
        }
    }

    pub fn stages(self) -> Stages {
        let (hardware, qccd_partition, mapping) = match self {
            Variant::Base => (HardwareRole::Base, QccdPartition::Natural, MappingStage::Natural),
            Variant::Switch => (HardwareRole::Switched, QccdPartition::Natural, MappingStage::Natural),
            Variant::Hp => (
                HardwareRole::Switched,
                QccdPartition::Hierarchical,
                MappingStage::Natural,
            ),
            Variant::HpSam => (
                HardwareRole::Switched,
                QccdPartition::Hierarchical,
                MappingStage::SwitchAware,
            ),
        };
        Stages {
            hardware,
            module_partition: ModulePartitionStage::KWay,
            qccd_partition,
            mapping,
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let up = s.to_ascii_uppercase().replace('-', "+");
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == up)
            .ok_or_else(|| format!("unknown variant `{s}` (expected BASE, SWITCH, HP or HP+SAM)"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HardwareRole {
    /// Single large switch, two attempts in flight.
    Base,
    /// Several small switches, eight attempts in flight.
    Switched,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModulePartitionStage {
    KWay,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QccdPartition {
    /// Index-ordered chunks of each module's qubits.
    Natural,
    /// KL split of each module with pairwise refinement.
    Hierarchical,
    /// As `Hierarchical`, seeded from inter-module communication.
    HierarchicalCommSeeded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MappingStage {
    Natural,
    SwitchAware,
}

/// The pipeline a variant runs, stage by stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stages {
    pub hardware: HardwareRole,
    pub module_partition: ModulePartitionStage,
    pub qccd_partition: QccdPartition,
    pub mapping: MappingStage,
}

impl Stages {
    /// Names of the stages that differ.
    pub fn diff(&self, other: &Stages) -> Vec<&'static str> {
        let mut out = Vec::new();
        if self.hardware != other.hardware {
            out.push("hardware");
        }
        if self.module_partition != other.module_partition {
            out.push("module_partition");
        }
        if self.qccd_partition != other.qccd_partition {
            out.push("qccd_partition");
        }
        if self.mapping != other.mapping {
            out.push("mapping");
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchSpec {
    pub name: Benchmark,
    pub qubits: usize,
    /// Overrides the seed derived from the root seed.
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LatencyModeChoice {
    Expected,
    Sampled,
}

/// Independent random streams fanned out from the root seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeedStream {
    Benchmark = 1,
    Init = 2,
    Sampling = 3,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// `splitmix64(splitmix64(root ^ stream) ^ index)`. `index` is the
/// benchmark's position in the config.
pub fn derive_seed(root: u64, stream: SeedStream, index: u64) -> u64 {
    splitmix64(splitmix64(root ^ stream as u64) ^ index)
}

fn default_variants() -> Vec<Variant> {
    Variant::ALL.to_vec()
}
fn default_arch() -> String {
    "desk".into()
}
fn default_sigma() -> f64 {
    1.0
}
fn default_p() -> usize {
    10
}
fn default_q() -> usize {
    4
}
fn default_normalize() -> Variant {
    Variant::Switch
}
fn default_mode() -> LatencyModeChoice {
    LatencyModeChoice::Expected
}
fn default_sweep_ports() -> Vec<u32> {
    vec![64, 48, 32, 16]
}
fn default_sweep_variant() -> Variant {
    Variant::HpSam
}
fn default_switch_ports() -> u32 {
    32
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// `desk` or `full`: picks the preset pair used for the base and switched
    /// roles.
    #[serde(default = "default_arch")]
    pub arch: String,
    /// Preset name or TOML path replacing the base-role hardware.
    #[serde(default)]
    pub base_hardware: Option<String>,
    /// Preset name or TOML path replacing the switched-role hardware.
    #[serde(default)]
    pub switched_hardware: Option<String>,
    #[serde(default)]
    pub benchmarks: Vec<BenchSpec>,
    #[serde(default = "default_variants")]
    pub variants: Vec<Variant>,
    #[serde(default)]
    pub root_seed: u64,
    /// Lookahead decay scale in slices.
    #[serde(default = "default_sigma")]
    pub sigma: f64,
    /// KL pass cap.
    #[serde(default = "default_p")]
    pub p: usize,
    /// Pairwise refinement rounds.
    #[serde(default = "default_q")]
    pub q: usize,
    /// Seed the QCCD-level split from inter-module communication in variants
    /// with switch-aware mapping.
    #[serde(default)]
    pub comm_seeded_init: bool,
    #[serde(default = "default_normalize")]
    pub normalize_to: Variant,
    #[serde(default = "default_mode")]
    pub latency_mode: LatencyModeChoice,
    #[serde(default)]
    pub trace: bool,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    #[serde(default = "default_sweep_ports")]
    pub sweep_ports: Vec<u32>,
    #[serde(default = "default_sweep_variant")]
    pub sweep_variant: Variant,
    /// Switch size kept fixed while the per-module port count varies.
    #[serde(default = "default_switch_ports")]
    pub sweep_switch_ports: u32,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all fields have defaults")
    }
}

impl ExperimentConfig {
    pub fn from_json_str(text: &str) -> Result<Self, HarnessError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_json_str(&text)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(HarnessError::Config(format!(
                "sigma must be positive, got {}",
                self.sigma
            )));
        }
        if self.p == 0 {
            return Err(HarnessError::Config("p must be at least 1".into()));
        }
        if self.arch != "desk" && self.arch != "full" {
            return Err(HarnessError::Config(format!(
                "arch must be `desk` or `full`, got `{}`",
                self.arch
            )));
        }
        if self.variants.is_empty() {
            return Err(HarnessError::Config("no variants selected".into()));
        }
        for b in &self.benchmarks {
            if b.qubits < 2 {
                return Err(HarnessError::Config(format!(
                    "{} needs at least 2 qubits",
                    b.name.name()
                )));
            }
        }
        Ok(())
    }

    pub fn hardware(&self, role: HardwareRole) -> Result<Hardware, HarnessError> {
        let (explicit, preset) = match (role, self.arch.as_str()) {
            (HardwareRole::Base, "full") => (&self.base_hardware, "baseline"),
            (HardwareRole::Base, _) => (&self.base_hardware, "desk-baseline"),
            (HardwareRole::Switched, "full") => (&self.switched_hardware, "switched"),
            (HardwareRole::Switched, _) => (&self.switched_hardware, "desk-switched"),
        };
        Ok(Hardware::resolve(explicit.as_deref().unwrap_or(preset))?)
    }

    pub fn bench_seed(&self, index: usize) -> u64 {
        self.benchmarks[index]
            .seed
            .unwrap_or_else(|| derive_seed(self.root_seed, SeedStream::Benchmark, index as u64))
    }
}
