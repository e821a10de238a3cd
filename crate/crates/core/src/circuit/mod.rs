//! Gate-level circuit IR and ASAP time-slicing.
//!
//! Gates carry only their class, operands and a free-form tag. Nothing
//! downstream needs unitaries: routing and the latency/fidelity ledgers only
//! look at which qubits a gate touches and whether it is a one-qubit gate,
//! a two-qubit gate or a measurement.

pub mod bench;
pub mod qasm;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use bench::{generate_benchmark, Benchmark};
pub use qasm::{read_qasm_subset, QasmError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CircuitError {
    #[error("circuit must have at least one qubit")]
    NoQubits,
    #[error("{kind} gate expects {expected} operand(s), got {got}")]
    Arity {
        kind: GateKind,
        expected: usize,
        got: usize,
    },
    #[error("two-qubit gate operands must be distinct (q{0})")]
    RepeatedOperand(usize),
    #[error("operand q{qubit} out of range for a {qubit_count}-qubit circuit")]
    OperandOutOfRange { qubit: usize, qubit_count: usize },
    #[error("unknown benchmark `{0}`")]
    UnknownBenchmark(String),
    #[error("benchmark needs at least 2 qubits, got {0}")]
    TooFewQubits(usize),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateKind {
    OneQubit,
    TwoQubit,
    Measurement,
}

impl GateKind {
    pub fn arity(self) -> usize {
        match self {
            GateKind::TwoQubit => 2,
            GateKind::OneQubit | GateKind::Measurement => 1,
        }
    }

    fn keyword(self) -> &'static str {
        match self {
            GateKind::OneQubit => "gate1",
            GateKind::TwoQubit => "gate2",
            GateKind::Measurement => "measure",
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

impl FromStr for GateKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "gate1" => Ok(GateKind::OneQubit),
            "gate2" => Ok(GateKind::TwoQubit),
            "measure" => Ok(GateKind::Measurement),
            other => Err(format!("unknown gate kind `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Gate {
    kind: GateKind,
    operands: Vec<usize>,
    tag: String,
}

impl Gate {
    pub fn new(kind: GateKind, operands: Vec<usize>, tag: impl Into<String>) -> Result<Self, CircuitError> {
        if operands.len() != kind.arity() {
            return Err(CircuitError::Arity {
                kind,
                expected: kind.arity(),
                got: operands.len(),
            });
        }
        if kind == GateKind::TwoQubit && operands[0] == operands[1] {
            return Err(CircuitError::RepeatedOperand(operands[0]));
        }
        Ok(Self {
            kind,
            operands,
            tag: tag.into(),
        })
    }

    pub fn one(tag: impl Into<String>, qubit: usize) -> Self {
        Self {
            kind: GateKind::OneQubit,
            operands: vec![qubit],
            tag: tag.into(),
        }
    }

    /// Panics if `a == b`.
    pub fn two(tag: impl Into<String>, a: usize, b: usize) -> Self {
        assert_ne!(a, b, "two-qubit gate on a single qubit");
        Self {
            kind: GateKind::TwoQubit,
            operands: vec![a, b],
            tag: tag.into(),
        }
    }

    pub fn measure(qubit: usize) -> Self {
        Self {
            kind: GateKind::Measurement,
            operands: vec![qubit],
            tag: "measure".into(),
        }
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn operands(&self) -> &[usize] {
        &self.operands
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    pub fn is_two_qubit(&self) -> bool {
        self.kind == GateKind::TwoQubit
    }

    /// The interacting pair, smaller index first.
    pub fn pair(&self) -> Option<(usize, usize)> {
        match self.operands.as_slice() {
            [a, b] if self.is_two_qubit() => Some(((*a).min(*b), (*a).max(*b))),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Circuit {
    qubit_count: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(qubit_count: usize) -> Result<Self, CircuitError> {
        if qubit_count == 0 {
            return Err(CircuitError::NoQubits);
        }
        Ok(Self {
            qubit_count,
            gates: Vec::new(),
        })
    }

    pub fn from_gates(qubit_count: usize, gates: Vec<Gate>) -> Result<Self, CircuitError> {
        let mut circuit = Self::new(qubit_count)?;
        for gate in gates {
            circuit.push(gate)?;
        }
        Ok(circuit)
    }

    pub fn push(&mut self, gate: Gate) -> Result<(), CircuitError> {
        if let Some(&qubit) = gate.operands.iter().find(|&&q| q >= self.qubit_count) {
            return Err(CircuitError::OperandOutOfRange {
                qubit,
                qubit_count: self.qubit_count,
            });
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn two_qubit_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_two_qubit()).count()
    }

    pub fn count_of(&self, kind: GateKind) -> usize {
        self.gates.iter().filter(|g| g.kind == kind).count()
    }

    /// Serializes to the line format read back by [`Circuit::from_str`]:
    /// a `qubits N` header followed by one `kind tag operands...` line per gate.
    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "qubits {}", self.qubit_count)?;
        for gate in &self.gates {
            write!(f, "{} {}", gate.kind, gate.tag)?;
            for q in &gate.operands {
                write!(f, " {q}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl FromStr for Circuit {
    type Err = CircuitError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let parse_err = |line: usize, message: String| CircuitError::Parse { line, message };
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());

        let (header_line, header) = lines
            .next()
            .ok_or_else(|| parse_err(1, "missing `qubits N` header".into()))?;
        let qubit_count = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
            ["qubits", n] => n
                .parse::<usize>()
                .map_err(|e| parse_err(header_line, format!("bad qubit count: {e}")))?,
            _ => return Err(parse_err(header_line, "expected `qubits N`".into())),
        };
        let mut circuit = Circuit::new(qubit_count)?;
        for (line, body) in lines {
            let mut fields = body.split_whitespace();
            let kind: GateKind = fields
                .next()
                .unwrap_or_default()
                .parse()
                .map_err(|e| parse_err(line, e))?;
            let tag = fields
                .next()
                .ok_or_else(|| parse_err(line, "missing gate tag".into()))?;
            let operands = fields
                .map(|f| {
                    f.parse::<usize>()
                        .map_err(|e| parse_err(line, format!("bad operand `{f}`: {e}")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let gate = Gate::new(kind, operands, tag).map_err(|e| parse_err(line, e.to_string()))?;
            circuit.push(gate).map_err(|e| parse_err(line, e.to_string()))?;
        }
        Ok(circuit)
    }
}

/// A set of gates with pairwise-disjoint operands.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimeSlice {
    pub index: usize,
    /// Positions of the slice's gates in the source circuit, ascending.
    pub gate_indices: Vec<usize>,
    pub gates: Vec<Gate>,
}

impl TimeSlice {
    pub fn interacting_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.gates.iter().filter_map(Gate::pair)
    }
}

/// ASAP layering: each gate lands in the earliest slice after the last slice
/// touching any of its operands.
pub fn time_slice(circuit: &Circuit) -> Vec<TimeSlice> {
    let mut frontier = vec![0usize; circuit.qubit_count()];
    let mut slices: Vec<TimeSlice> = Vec::new();
    for (i, gate) in circuit.gates().iter().enumerate() {
        let level = gate.operands().iter().map(|&q| frontier[q]).max().unwrap_or(0);
        for &q in gate.operands() {
            frontier[q] = level + 1;
        }
        if level == slices.len() {
            slices.push(TimeSlice {
                index: level,
                gate_indices: Vec::new(),
                gates: Vec::new(),
            });
        }
        slices[level].gate_indices.push(i);
        slices[level].gates.push(gate.clone());
    }
    slices
}

/// Concatenates slices back into a circuit, slice by slice.
pub fn flatten_slices(qubit_count: usize, slices: &[TimeSlice]) -> Result<Circuit, CircuitError> {
    Circuit::from_gates(
        qubit_count,
        slices.iter().flat_map(|s| s.gates.iter().cloned()).collect(),
    )
}

/// Slice index of every gate, in circuit order.
pub fn slice_of_gates(slices: &[TimeSlice], gate_count: usize) -> Vec<usize> {
    let mut out = vec![0; gate_count];
    for slice in slices {
        for &g in &slice.gate_indices {
            out[g] = slice.index;
        }
    }
    out
}
