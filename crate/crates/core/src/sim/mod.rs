//! Discrete-event execution of a mapped circuit on a modular QCCD machine.

mod engine;
mod state;
mod trace;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arch::{ArchError, CalibrationTable};

pub use engine::{simulate, Execution, Simulator};
pub use state::{MachineState, TrapRef};
pub use trace::{parse_trace, write_trace, TraceHeader};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("gate {gate} cannot be routed: {reason}")]
    Unroutable { gate: usize, reason: String },
    #[error("mapping: {0}")]
    Mapping(String),
    #[error("invariant violated after gate {gate}: {message}")]
    Invariant { gate: usize, message: String },
    #[error("trace line {line}: {message}")]
    Trace { line: usize, message: String },
    #[error(transparent)]
    Arch(#[from] ArchError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OpKind {
    Gate1,
    Gate2,
    Split,
    Merge,
    ShuttleStep,
    XJunction,
    MatterLink,
    Entangle,
    Distill,
    TeleportLocal,
    Measure,
    Cool,
}

impl OpKind {
    pub const ALL: [OpKind; 12] = [
        OpKind::Gate1,
        OpKind::Gate2,
        OpKind::Split,
        OpKind::Merge,
        OpKind::ShuttleStep,
        OpKind::XJunction,
        OpKind::MatterLink,
        OpKind::Entangle,
        OpKind::Distill,
        OpKind::TeleportLocal,
        OpKind::Measure,
        OpKind::Cool,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OpKind::Gate1 => "gate1",
            OpKind::Gate2 => "gate2",
            OpKind::Split => "split",
            OpKind::Merge => "merge",
            OpKind::ShuttleStep => "shuttle_step",
            OpKind::XJunction => "x_junction",
            OpKind::MatterLink => "matter_link",
            OpKind::Entangle => "entangle",
            OpKind::Distill => "distill",
            OpKind::TeleportLocal => "teleport_local",
            OpKind::Measure => "measure",
            OpKind::Cool => "cool",
        }
    }
}

impl fmt::Display for OpKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OpKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        OpKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown op kind `{s}`"))
    }
}

/// Where an op happens.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "at", rename_all = "snake_case")]
pub enum Location {
    Trap { module: usize, qccd: usize, trap: usize },
    Link { module: usize, link: usize, channel: usize },
    Switch { switch: usize, from: usize, to: usize },
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Location::Trap { module, qccd, trap } => write!(f, "m{module}.q{qccd}.t{trap}"),
            Location::Link { module, link, channel } => write!(f, "m{module}.l{link}.c{channel}"),
            Location::Switch { switch, from, to } => write!(f, "s{switch}:m{from}-m{to}"),
        }
    }
}

impl FromStr for Location {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || format!("bad location `{s}`");
        let num = |part: &str, prefix: char| -> Result<usize, String> {
            part.strip_prefix(prefix).and_then(|x| x.parse().ok()).ok_or_else(bad)
        };
        if let Some((sw, pair)) = s.split_once(':') {
            let (from, to) = pair.split_once('-').ok_or_else(bad)?;
            return Ok(Location::Switch {
                switch: num(sw, 's')?,
                from: num(from, 'm')?,
                to: num(to, 'm')?,
            });
        }
        let parts: Vec<&str> = s.split('.').collect();
        match parts[..] {
            [m, q, t] if q.starts_with('q') => Ok(Location::Trap {
                module: num(m, 'm')?,
                qccd: num(q, 'q')?,
                trap: num(t, 't')?,
            }),
            [m, l, c] => Ok(Location::Link {
                module: num(m, 'm')?,
                link: num(l, 'l')?,
                channel: num(c, 'c')?,
            }),
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhysicalOp {
    pub kind: OpKind,
    pub location: Location,
    /// Data qubits held by the op.
    pub qubits: Vec<usize>,
    pub start_us: f64,
    pub duration_us: f64,
    pub infidelity: f64,
    /// Raw Bell pairs consumed; nonzero only for entanglement.
    pub raw_pairs: u64,
    /// Circuit gate this op serves.
    pub gate: Option<usize>,
}

impl PhysicalOp {
    pub fn end_us(&self) -> f64 {
        self.start_us + self.duration_us
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum LatencyMode {
    /// Every entanglement takes its expected latency.
    Expected,
    /// Attempt rounds drawn from a geometric distribution.
    Sampled { seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimOptions {
    pub latency_mode: LatencyMode,
    /// Re-check qubit conservation and trap occupancy after every gate.
    pub check_invariants: bool,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            latency_mode: LatencyMode::Expected,
            check_invariants: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceSpan {
    pub slice: usize,
    pub start_us: f64,
    pub end_us: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExecutionReport {
    pub latency_us: f64,
    pub op_counts: BTreeMap<OpKind, usize>,
    pub matter_link_crossings: usize,
    pub entanglements: usize,
    pub raw_pairs: u64,
    pub remote_gates: usize,
    /// Time covered by at least one entanglement, over the makespan.
    pub photonic_share: f64,
    pub fidelity: f64,
    /// Longest dependency chain of per-gate minimum latencies.
    pub critical_path_us: f64,
    pub timeline: Vec<SliceSpan>,
}

impl ExecutionReport {
    pub fn count(&self, kind: OpKind) -> usize {
        self.op_counts.get(&kind).copied().unwrap_or(0)
    }

    pub fn total_ops(&self) -> usize {
        self.op_counts.values().sum()
    }
}

/// Product of op fidelities times idle decoherence of every data qubit,
/// where idle time is the makespan minus the time the qubit spends in ops.
pub fn estimate_fidelity(ops: &[PhysicalOp], makespan_us: f64, qubit_count: usize, table: &CalibrationTable) -> f64 {
    let mut log_f = 0.0;
    let mut busy = vec![0.0; qubit_count];
    for op in ops {
        log_f += (-op.infidelity).ln_1p();
        for &q in &op.qubits {
            if q < qubit_count {
                busy[q] += op.duration_us;
            }
        }
    }
    for b in busy {
        let idle = (makespan_us - b).max(0.0);
        log_f -= idle / table.t2_us;
    }
    log_f.exp()
}

/// Total length of the union of `[start, end)` intervals.
pub(crate) fn union_length(mut spans: Vec<(f64, f64)>) -> f64 {
    spans.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut total = 0.0;
    let mut cur: Option<(f64, f64)> = None;
    for (s, e) in spans {
        match cur {
            Some((cs, ce)) if s <= ce => cur = Some((cs, ce.max(e))),
            Some((cs, ce)) => {
                total += ce - cs;
                cur = Some((s, e));
            }
            None => cur = Some((s, e)),
        }
    }
    if let Some((cs, ce)) = cur {
        total += ce - cs;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    fn op(kind: OpKind, qubits: Vec<usize>, start: f64, duration: f64, infidelity: f64) -> PhysicalOp {
        PhysicalOp {
            kind,
            location: Location::Trap {
                module: 0,
                qccd: 0,
                trap: 0,
            },
            qubits,
            start_us: start,
            duration_us: duration,
            infidelity,
            raw_pairs: 0,
            gate: None,
        }
    }

    #[test]
    fn fidelity_examples() {
        let t = CalibrationTable::default();
        assert_eq!(estimate_fidelity(&[], 0.0, 3, &t), 1.0);
        let link = op(OpKind::MatterLink, vec![0], 0.0, 400.0, 7e-8);
        let f = estimate_fidelity(&[link], 400.0, 1, &t);
        assert!((f - (1.0 - 7e-8)).abs() < 1e-15);
        let mut inf = t.clone();
        inf.t2_us = f64::INFINITY;
        let ops = [
            op(OpKind::Gate2, vec![0, 1], 0.0, 100.0, 8e-4),
            op(OpKind::Gate2, vec![0, 1], 100.0, 100.0, 8e-4),
        ];
        let f = estimate_fidelity(&ops, 200.0, 2, &inf);
        assert!((f - (1.0 - 8e-4f64).powi(2)).abs() < 1e-15);
    }

    #[test]
    fn fidelity_drops_with_makespan() {
        let t = CalibrationTable::default();
        let ops = [op(OpKind::Gate1, vec![0], 0.0, 5.0, 3e-5)];
        let a = estimate_fidelity(&ops, 5.0, 2, &t);
        let b = estimate_fidelity(&ops, 500.0, 2, &t);
        assert!(b < a);
    }

    #[test]
    fn location_text_round_trip() {
        for loc in [
            Location::Trap {
                module: 3,
                qccd: 1,
                trap: 0,
            },
            Location::Link {
                module: 0,
                link: 2,
                channel: 7,
            },
            Location::Switch {
                switch: 5,
                from: 0,
                to: 3,
            },
        ] {
            assert_eq!(loc.to_string().parse::<Location>().unwrap(), loc);
        }
        assert!("m1.x".parse::<Location>().is_err());
    }

    #[test]
    fn interval_union() {
        assert_eq!(union_length(vec![]), 0.0);
        assert_eq!(union_length(vec![(0.0, 2.0), (1.0, 3.0), (5.0, 6.0)]), 4.0);
    }
}
