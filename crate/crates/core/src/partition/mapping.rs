use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{PartitionError, PartitionTree};
use crate::arch::{ArchitectureSpec, QccdRole};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Placement {
    pub module: usize,
    pub qccd: usize,
    /// Data slot within the QCCD.
    pub slot: usize,
}

/// Logical qubit to physical data slot, injective.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MappingAssignment {
    placements: Vec<Placement>,
    #[serde(skip)]
    reverse: BTreeMap<Placement, usize>,
}

impl MappingAssignment {
    pub fn new(placements: Vec<Placement>) -> Result<Self, PartitionError> {
        let mut reverse = BTreeMap::new();
        for (q, &p) in placements.iter().enumerate() {
            if let Some(other) = reverse.insert(p, q) {
                return Err(PartitionError::Mapping(format!(
                    "qubits {other} and {q} share module {} QCCD {} slot {}",
                    p.module, p.qccd, p.slot
                )));
            }
        }
        Ok(Self { placements, reverse })
    }

    /// Checks every placement against the machine's data capacities.
    pub fn check(&self, arch: &ArchitectureSpec) -> Result<(), PartitionError> {
        for (q, p) in self.placements.iter().enumerate() {
            let ok = p.module < arch.module_count()
                && p.qccd < arch.module(p.module).qccd_count()
                && p.slot < arch.module(p.module).qccds[p.qccd].data_capacity;
            if !ok {
                return Err(PartitionError::Mapping(format!(
                    "qubit {q} placed outside the machine at {p:?}"
                )));
            }
        }
        Ok(())
    }

    pub fn qubit_count(&self) -> usize {
        self.placements.len()
    }

    pub fn placement(&self, q: usize) -> Placement {
        self.placements[q]
    }

    pub fn placements(&self) -> &[Placement] {
        &self.placements
    }

    pub fn qubit_at(&self, p: Placement) -> Option<usize> {
        self.reverse.get(&p).copied()
    }

    pub fn module_of(&self, q: usize) -> usize {
        self.placements[q].module
    }

    /// One `qubit module qccd slot` line per qubit after a header.
    pub fn to_text(&self) -> String {
        let mut out = format!("# mapping v1 qubits {}\n", self.placements.len());
        for (q, p) in self.placements.iter().enumerate() {
            writeln!(out, "{q} {} {} {}", p.module, p.qccd, p.slot).unwrap();
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, PartitionError> {
        let err = |line: usize, m: &str| PartitionError::Mapping(format!("line {line}: {m}"));
        let mut expected = None;
        let mut placements = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("# mapping v1 qubits ") {
                expected = Some(rest.trim().parse::<usize>().map_err(|_| err(i + 1, "bad header"))?);
                continue;
            }
            if line.starts_with('#') {
                continue;
            }
            let nums: Vec<usize> = line
                .split_whitespace()
                .map(str::parse)
                .collect::<Result<_, _>>()
                .map_err(|_| err(i + 1, "expected four integers"))?;
            let [q, module, qccd, slot] = nums[..] else {
                return Err(err(i + 1, "expected four integers"));
            };
            if q != placements.len() {
                return Err(err(i + 1, "qubits must be listed in order"));
            }
            placements.push(Placement { module, qccd, slot });
        }
        match expected {
            Some(n) if n == placements.len() => Self::new(placements),
            Some(n) => Err(err(
                0,
                &format!("header announces {n} qubits, found {}", placements.len()),
            )),
            None => Err(err(1, "missing header")),
        }
    }
}

fn place(
    tree: &PartitionTree,
    arch: &ArchitectureSpec,
    order: impl Fn(usize) -> Vec<(usize, usize)>,
) -> Result<MappingAssignment, PartitionError> {
    if tree.modules().len() != arch.module_count() {
        return Err(PartitionError::Mapping(format!(
            "{} module partitions for {} modules",
            tree.modules().len(),
            arch.module_count()
        )));
    }
    let mut placements = vec![
        Placement {
            module: 0,
            qccd: 0,
            slot: 0
        };
        tree.qubit_count()
    ];
    for (m, part) in tree.modules().iter().enumerate() {
        let pairs = order(m);
        let used: usize = part.subs.iter().filter(|s| !s.qubits.is_empty()).count();
        if pairs.len() < used {
            return Err(PartitionError::Mapping(format!(
                "module {m} has {used} sub-partitions but {} data QCCDs",
                pairs.len()
            )));
        }
        for (sub, qccd) in pairs {
            let qubits = &part.subs[sub].qubits;
            let capacity = arch.module(m).qccds[qccd].data_capacity;
            if qubits.len() > capacity {
                return Err(PartitionError::OverCapacity {
                    module: m,
                    sub,
                    qccd,
                    size: qubits.len(),
                    capacity,
                });
            }
            for (slot, &q) in qubits.iter().enumerate() {
                placements[q] = Placement { module: m, qccd, slot };
            }
        }
    }
    let mapping = MappingAssignment::new(placements)?;
    mapping.check(arch)?;
    Ok(mapping)
}

/// Sub-partition `s` of module `m` onto the `s`-th data QCCD of module `m`.
pub fn natural_map(tree: &PartitionTree, arch: &ArchitectureSpec) -> Result<MappingAssignment, PartitionError> {
    place(tree, arch, |m| {
        let subs = tree.modules()[m].subs.len();
        arch.module(m).data_qccds().into_iter().take(subs).enumerate().collect()
    })
}

/// Most communicating sub-partition onto the data QCCD nearest the photonic
/// ports, and so on down both orders. Ties: lower sub-partition index,
/// communication QCCDs before computing ones, then lower QCCD index.
pub fn switch_aware_map(tree: &PartitionTree, arch: &ArchitectureSpec) -> Result<MappingAssignment, PartitionError> {
    place(tree, arch, |m| {
        let subs = &tree.modules()[m].subs;
        let mut sub_order: Vec<usize> = (0..subs.len()).collect();
        sub_order.sort_by(|&a, &b| subs[b].comm_score.total_cmp(&subs[a].comm_score).then(a.cmp(&b)));
        let module = arch.module(m);
        let mut qccds = module.data_qccds();
        qccds.sort_by_key(|&q| {
            (
                module.port_distance(q),
                module.qccds[q].role != QccdRole::Communication,
                q,
            )
        });
        sub_order.into_iter().zip(qccds).collect()
    })
}
