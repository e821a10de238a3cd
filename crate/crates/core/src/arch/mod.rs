//! Physical architecture: modules of QCCDs joined by matter-links, and the
//! photonic switch fabric between modules.

mod calibration;
mod config;
mod entangle;

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use calibration::{xbar_latency, CalibrationTable, OpCost, XbarAnchor};
pub use config::{Hardware, RoutingOptions, PRESET_NAMES};
pub use entangle::{
    distilled_fidelity, entanglement_latency, expected_rounds, non_xbar_latency, purify_once, CalibratedLatency,
    EntanglementModel,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ArchError {
    #[error("xbar latency table has no anchors")]
    NoAnchors,
    #[error("switch needs at least 2 ports, got {0}")]
    TooFewPorts(u32),
    #[error("attempt concurrency must be at least 1")]
    ZeroConcurrency,
    #[error("attempt success probability must lie in (0, 1], got {0}")]
    BadProbability(f64),
    #[error("invalid calibration: {0}")]
    Calibration(String),
    #[error("invalid module {module}: {message}")]
    Module { module: usize, message: String },
    #[error("invalid switch topology: {0}")]
    Switch(String),
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("config: {0}")]
    Config(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QccdRole {
    Computing,
    Communication,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QccdSpec {
    pub role: QccdRole,
    /// Logical data qubits the mapper may place here.
    pub data_capacity: usize,
    /// Communication ions reserved for entanglement and distillation.
    #[serde(default)]
    pub comm_capacity: usize,
    /// Wired directly to the module's photonic ports.
    #[serde(default)]
    pub port_attached: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModuleSpec {
    pub qccds: Vec<QccdSpec>,
    /// Neighbouring QCCD pairs joined by matter-links.
    pub links: Vec<(usize, usize)>,
    pub links_per_pair: usize,
    pub ports: u32,
    pub traps_per_qccd: usize,
    /// Ions (data qubits) a single trap can hold.
    pub trap_capacity: usize,
    #[serde(skip)]
    port_distance: Vec<usize>,
}

impl ModuleSpec {
    pub fn new(
        qccds: Vec<QccdSpec>,
        links: Vec<(usize, usize)>,
        links_per_pair: usize,
        ports: u32,
        traps_per_qccd: usize,
        trap_capacity: usize,
    ) -> Self {
        Self {
            qccds,
            links,
            links_per_pair,
            ports,
            traps_per_qccd,
            trap_capacity,
            port_distance: Vec::new(),
        }
    }

    fn neighbours(&self, q: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .links
            .iter()
            .filter_map(|&(a, b)| match q {
                _ if a == q => Some(b),
                _ if b == q => Some(a),
                _ => None,
            })
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    fn validate(&mut self, module: usize) -> Result<(), ArchError> {
        let err = |message: String| ArchError::Module { module, message };
        let n = self.qccds.len();
        if n == 0 {
            return Err(err("no QCCDs".into()));
        }
        if self.traps_per_qccd == 0 || self.trap_capacity == 0 {
            return Err(err("traps_per_qccd and trap_capacity must be positive".into()));
        }
        if self.links_per_pair == 0 {
            return Err(err("links_per_pair must be positive".into()));
        }
        for (i, q) in self.qccds.iter().enumerate() {
            if q.data_capacity > self.traps_per_qccd * self.trap_capacity {
                return Err(err(format!(
                    "QCCD {i} data capacity {} exceeds its {} trap slots",
                    q.data_capacity,
                    self.traps_per_qccd * self.trap_capacity
                )));
            }
            if q.port_attached && q.role != QccdRole::Communication {
                return Err(err(format!("QCCD {i} is port-attached but not a communication QCCD")));
            }
        }
        for &(a, b) in &self.links {
            if a >= n || b >= n || a == b {
                return Err(err(format!("bad matter-link ({a}, {b})")));
            }
        }
        let sources: Vec<usize> = (0..n).filter(|&i| self.qccds[i].port_attached).collect();
        if sources.is_empty() {
            return Err(err("no port-attached communication QCCD".into()));
        }
        let mut dist = vec![usize::MAX; n];
        let mut queue = VecDeque::new();
        for &s in &sources {
            dist[s] = 0;
            queue.push_back(s);
        }
        while let Some(u) = queue.pop_front() {
            for v in self.neighbours(u) {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        if let Some(i) = dist.iter().position(|&d| d == usize::MAX) {
            return Err(err(format!("QCCD {i} cannot reach a photonic port")));
        }
        self.port_distance = dist;
        Ok(())
    }

    /// Matter-link hops from `qccd` to the nearest port-attached QCCD.
    pub fn port_distance(&self, qccd: usize) -> usize {
        self.port_distance[qccd]
    }

    pub fn qccd_count(&self) -> usize {
        self.qccds.len()
    }

    /// Shortest QCCD path `from -> to`, both ends included. Ties go to the
    /// lowest-index neighbour.
    pub fn path(&self, from: usize, to: usize) -> Vec<usize> {
        let n = self.qccds.len();
        let mut prev = vec![usize::MAX; n];
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([from]);
        seen[from] = true;
        while let Some(u) = queue.pop_front() {
            if u == to {
                break;
            }
            for v in self.neighbours(u) {
                if !seen[v] {
                    seen[v] = true;
                    prev[v] = u;
                    queue.push_back(v);
                }
            }
        }
        let mut path = vec![to];
        let mut cur = to;
        while cur != from {
            cur = prev[cur];
            path.push(cur);
        }
        path.reverse();
        path
    }

    /// Index of the matter-link pair between neighbouring QCCDs.
    pub fn link_index(&self, a: usize, b: usize) -> Option<usize> {
        self.links
            .iter()
            .position(|&(x, y)| (x, y) == (a, b) || (x, y) == (b, a))
    }

    /// QCCDs that hold data, in index order.
    pub fn data_qccds(&self) -> Vec<usize> {
        (0..self.qccds.len())
            .filter(|&i| self.qccds[i].data_capacity > 0)
            .collect()
    }

    /// Port-attached QCCDs ordered by index.
    pub fn port_qccds(&self) -> Vec<usize> {
        (0..self.qccds.len()).filter(|&i| self.qccds[i].port_attached).collect()
    }

    pub fn communication_qccds(&self) -> Vec<usize> {
        (0..self.qccds.len())
            .filter(|&i| self.qccds[i].role == QccdRole::Communication)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SwitchTopology {
    /// One large switch carrying every module port.
    Monolithic { ports_total: u32 },
    /// `switch_count` identical switches; every module wires the same number
    /// of its ports into each switch.
    MultiSwitch { switch_count: u32, ports_per_switch: u32 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArchitectureSpec {
    modules: Vec<ModuleSpec>,
    switch: SwitchTopology,
}

impl ArchitectureSpec {
    pub fn new(modules: Vec<ModuleSpec>, switch: SwitchTopology) -> Result<Self, ArchError> {
        let mut spec = Self { modules, switch };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&mut self) -> Result<(), ArchError> {
        if self.modules.len() < 2 {
            return Err(ArchError::Switch("need at least two modules".into()));
        }
        for (i, m) in self.modules.iter_mut().enumerate() {
            m.validate(i)?;
        }
        let total: u32 = self.modules.iter().map(|m| m.ports).sum();
        let k = self.modules.len() as u32;
        match self.switch {
            SwitchTopology::Monolithic { ports_total } => {
                if ports_total != total {
                    return Err(ArchError::Switch(format!(
                        "monolithic switch has {ports_total} ports, modules expose {total}"
                    )));
                }
            }
            SwitchTopology::MultiSwitch {
                switch_count,
                ports_per_switch,
            } => {
                if switch_count == 0 || switch_count * ports_per_switch != total {
                    return Err(ArchError::Switch(format!(
                        "{switch_count} x {ports_per_switch} switch ports do not match {total} module ports"
                    )));
                }
                if ports_per_switch % k != 0 {
                    return Err(ArchError::Switch(format!(
                        "{ports_per_switch}-port switch cannot be shared evenly by {k} modules"
                    )));
                }
                let share = ports_per_switch / k;
                if let Some(m) = self.modules.iter().position(|m| m.ports != share * switch_count) {
                    return Err(ArchError::Switch(format!(
                        "module {m} does not wire {share} port(s) into each of {switch_count} switches"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn modules(&self) -> &[ModuleSpec] {
        &self.modules
    }

    pub fn module(&self, m: usize) -> &ModuleSpec {
        &self.modules[m]
    }

    pub fn module_count(&self) -> usize {
        self.modules.len()
    }

    pub fn switch(&self) -> &SwitchTopology {
        &self.switch
    }

    /// Port count of the switch an entanglement traverses.
    pub fn governing_switch_ports(&self) -> u32 {
        match self.switch {
            SwitchTopology::Monolithic { ports_total } => ports_total,
            SwitchTopology::MultiSwitch { ports_per_switch, .. } => ports_per_switch,
        }
    }

    pub fn switch_count(&self) -> usize {
        match self.switch {
            SwitchTopology::Monolithic { .. } => 1,
            SwitchTopology::MultiSwitch { switch_count, .. } => switch_count as usize,
        }
    }

    /// Simultaneous port-to-port paths a single switch can hold.
    pub fn paths_per_switch(&self) -> usize {
        (self.governing_switch_ports() / 2).max(1) as usize
    }

    /// Switch index of each of `module`'s ports.
    pub fn port_wiring(&self, module: usize) -> Vec<usize> {
        let ports = self.modules[module].ports as usize;
        match self.switch {
            SwitchTopology::Monolithic { .. } => vec![0; ports],
            SwitchTopology::MultiSwitch { switch_count, .. } => (0..ports).map(|p| p % switch_count as usize).collect(),
        }
    }

    pub fn data_capacity(&self) -> usize {
        self.modules
            .iter()
            .flat_map(|m| m.qccds.iter())
            .map(|q| q.data_capacity)
            .sum()
    }

    /// Copy with a different fabric, revalidated.
    pub fn with_switch(&self, switch: SwitchTopology) -> Result<Self, ArchError> {
        Self::new(self.modules.clone(), switch)
    }

    /// Copy with every module exposing `ports` ports, revalidated.
    pub fn with_ports(&self, ports: u32, switch: SwitchTopology) -> Result<Self, ArchError> {
        let modules = self
            .modules
            .iter()
            .cloned()
            .map(|mut m| {
                m.ports = ports;
                m
            })
            .collect();
        Self::new(modules, switch)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_module(ports: u32) -> ModuleSpec {
        let cmp = QccdSpec {
            role: QccdRole::Computing,
            data_capacity: 8,
            comm_capacity: 0,
            port_attached: false,
        };
        let cmn = QccdSpec {
            role: QccdRole::Communication,
            data_capacity: 8,
            comm_capacity: 8,
            port_attached: true,
        };
        ModuleSpec::new(
            vec![cmp.clone(), cmp, cmn.clone(), cmn],
            vec![(0, 1), (0, 2), (1, 3), (2, 3)],
            8,
            ports,
            2,
            6,
        )
    }

    #[test]
    fn port_distances_follow_links() {
        let arch = ArchitectureSpec::new(
            vec![grid_module(64); 4],
            SwitchTopology::Monolithic { ports_total: 256 },
        )
        .unwrap();
        let m = arch.module(0);
        assert_eq!((0..4).map(|q| m.port_distance(q)).collect::<Vec<_>>(), vec![1, 1, 0, 0]);
        assert_eq!(m.path(0, 3), vec![0, 1, 3]);
        assert_eq!(m.path(2, 2), vec![2]);
        assert_eq!(m.link_index(3, 1), Some(2));
        assert_eq!(m.link_index(0, 3), None);
    }

    #[test]
    fn monolithic_port_total_must_match() {
        let err = ArchitectureSpec::new(
            vec![grid_module(64); 4],
            SwitchTopology::Monolithic { ports_total: 128 },
        );
        assert!(matches!(err, Err(ArchError::Switch(_))));
    }

    #[test]
    fn multiswitch_table_layout() {
        let arch = ArchitectureSpec::new(
            vec![grid_module(64); 4],
            SwitchTopology::MultiSwitch {
                switch_count: 8,
                ports_per_switch: 32,
            },
        )
        .unwrap();
        assert_eq!(arch.governing_switch_ports(), 32);
        let wiring = arch.port_wiring(1);
        for s in 0..8 {
            assert_eq!(wiring.iter().filter(|&&x| x == s).count(), 8);
        }
    }

    #[test]
    fn one_port_per_switch_never_shares() {
        // Each of 64 ports per module on its own 4-port switch.
        let arch = ArchitectureSpec::new(
            vec![grid_module(64); 4],
            SwitchTopology::MultiSwitch {
                switch_count: 64,
                ports_per_switch: 4,
            },
        )
        .unwrap();
        for m in 0..4 {
            let mut w = arch.port_wiring(m);
            w.sort_unstable();
            w.dedup();
            assert_eq!(w.len(), 64);
        }
        assert!(ArchitectureSpec::new(
            vec![grid_module(64); 4],
            SwitchTopology::MultiSwitch {
                switch_count: 16,
                ports_per_switch: 15,
            },
        )
        .is_err());
    }

    #[test]
    fn module_validation() {
        let mut bad = grid_module(64);
        bad.links = vec![(0, 1), (2, 3)];
        assert!(matches!(
            ArchitectureSpec::new(vec![bad.clone(), bad], SwitchTopology::Monolithic { ports_total: 128 }),
            Err(ArchError::Module { module: 0, .. })
        ));
        let mut over = grid_module(64);
        over.qccds[0].data_capacity = 13;
        assert!(ArchitectureSpec::new(
            vec![over, grid_module(64)],
            SwitchTopology::Monolithic { ports_total: 128 }
        )
        .is_err());
        assert!(ArchitectureSpec::new(vec![grid_module(64)], SwitchTopology::Monolithic { ports_total: 64 }).is_err());
    }
}
