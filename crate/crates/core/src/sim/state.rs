use crate::arch::ArchitectureSpec;
use crate::partition::MappingAssignment;

use super::SimError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TrapRef {
    pub module: usize,
    pub qccd: usize,
    pub trap: usize,
}

/// Ion positions and resource availability during a run.
#[derive(Debug, Clone)]
pub struct MachineState {
    location: Vec<TrapRef>,
    /// `[module][qccd][trap]` residents.
    rosters: Vec<Vec<Vec<Vec<usize>>>>,
    trap_capacity: Vec<usize>,
    pub(crate) qubit_ready: Vec<f64>,
    /// Logical clock of each qubit's last use; drives eviction.
    pub(crate) last_touch: Vec<u64>,
    /// `[module][link][channel]` free-at times.
    pub(crate) link_free: Vec<Vec<Vec<f64>>>,
    /// `[switch][path]` free-at times.
    pub(crate) path_free: Vec<Vec<f64>>,
    /// `[module][slot]` free-at times for concurrent entanglements.
    pub(crate) slot_free: Vec<Vec<f64>>,
}

impl MachineState {
    pub fn new(
        arch: &ArchitectureSpec,
        mapping: &MappingAssignment,
        qubit_count: usize,
        max_entanglements_per_module: usize,
    ) -> Result<Self, SimError> {
        if mapping.qubit_count() < qubit_count {
            return Err(SimError::Mapping(format!(
                "mapping covers {} qubits, circuit uses {qubit_count}",
                mapping.qubit_count()
            )));
        }
        mapping.check(arch).map_err(|e| SimError::Mapping(e.to_string()))?;
        let mut rosters: Vec<Vec<Vec<Vec<usize>>>> = arch
            .modules()
            .iter()
            .map(|m| vec![vec![Vec::new(); m.traps_per_qccd]; m.qccd_count()])
            .collect();
        let mut location = Vec::with_capacity(qubit_count);
        for q in 0..qubit_count {
            let p = mapping.placement(q);
            let module = arch.module(p.module);
            let trap = p.slot / module.trap_capacity;
            if trap >= module.traps_per_qccd {
                return Err(SimError::Mapping(format!("qubit {q} slot {} has no trap", p.slot)));
            }
            rosters[p.module][p.qccd][trap].push(q);
            location.push(TrapRef {
                module: p.module,
                qccd: p.qccd,
                trap,
            });
        }
        let link_free = arch
            .modules()
            .iter()
            .map(|m| vec![vec![0.0; m.links_per_pair]; m.links.len()])
            .collect();
        let path_free = vec![vec![0.0; arch.paths_per_switch()]; arch.switch_count()];
        Ok(Self {
            location,
            rosters,
            trap_capacity: arch.modules().iter().map(|m| m.trap_capacity).collect(),
            qubit_ready: vec![0.0; qubit_count],
            last_touch: vec![0; qubit_count],
            link_free,
            path_free,
            slot_free: vec![vec![0.0; max_entanglements_per_module]; arch.module_count()],
        })
    }

    pub fn qubit_count(&self) -> usize {
        self.location.len()
    }

    pub fn location(&self, q: usize) -> TrapRef {
        self.location[q]
    }

    pub fn residents(&self, t: TrapRef) -> &[usize] {
        &self.rosters[t.module][t.qccd][t.trap]
    }

    pub fn occupancy(&self, t: TrapRef) -> usize {
        self.residents(t).len()
    }

    pub fn has_room(&self, t: TrapRef) -> bool {
        self.occupancy(t) < self.trap_capacity[t.module]
    }

    pub fn traps_in(&self, module: usize, qccd: usize) -> impl Iterator<Item = TrapRef> + '_ {
        (0..self.rosters[module][qccd].len()).map(move |trap| TrapRef { module, qccd, trap })
    }

    pub fn qubit_ready(&self, q: usize) -> f64 {
        self.qubit_ready[q]
    }

    pub(crate) fn relocate(&mut self, q: usize, to: TrapRef) {
        let from = self.location[q];
        let roster = &mut self.rosters[from.module][from.qccd][from.trap];
        roster.retain(|&x| x != q);
        self.rosters[to.module][to.qccd][to.trap].push(q);
        self.location[q] = to;
    }

    /// Every qubit sits in exactly one trap and no trap is over capacity.
    pub fn check_conservation(&self) -> Result<(), String> {
        let mut seen = vec![0usize; self.location.len()];
        for (m, qccds) in self.rosters.iter().enumerate() {
            for (c, traps) in qccds.iter().enumerate() {
                for (t, roster) in traps.iter().enumerate() {
                    if roster.len() > self.trap_capacity[m] {
                        return Err(format!("trap m{m}.q{c}.t{t} holds {} ions", roster.len()));
                    }
                    for &q in roster {
                        seen[q] += 1;
                        let here = TrapRef {
                            module: m,
                            qccd: c,
                            trap: t,
                        };
                        if self.location[q] != here {
                            return Err(format!("qubit {q} listed in m{m}.q{c}.t{t} but located elsewhere"));
                        }
                    }
                }
            }
        }
        match seen.iter().position(|&s| s != 1) {
            Some(q) => Err(format!("qubit {q} appears in {} traps", seen[q])),
            None => Ok(()),
        }
    }
}

/// Earliest-free server; lowest index on ties.
pub(crate) fn earliest(free: &[f64]) -> usize {
    let mut best = 0;
    for (i, &t) in free.iter().enumerate() {
        if t < free[best] {
            best = i;
        }
    }
    best
}
