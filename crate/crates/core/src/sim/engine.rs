use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};
use serde::{Deserialize, Serialize};

use super::state::{earliest, MachineState, TrapRef};
use super::{
    estimate_fidelity, union_length, ExecutionReport, LatencyMode, Location, OpKind, PhysicalOp, SimError, SimOptions,
    SliceSpan,
};
use crate::arch::{distilled_fidelity, expected_rounds, non_xbar_latency, xbar_latency, Hardware, OpCost};
use crate::circuit::{time_slice, Circuit, Gate, GateKind};
use crate::partition::MappingAssignment;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Execution {
    pub report: ExecutionReport,
    pub ops: Vec<PhysicalOp>,
}

/// Routes and schedules gates one at a time in dispatch order. Every op
/// starts as soon as its qubits and resources are free.
pub struct Simulator<'a> {
    hw: &'a Hardware,
    state: MachineState,
    ops: Vec<PhysicalOp>,
    rng: Option<ChaCha8Rng>,
    clock: u64,
    xbar_us: f64,
    non_xbar_us: f64,
    expected_rounds: f64,
    pair_infidelity: f64,
    raw_pairs: u64,
    distill_us: f64,
}

impl<'a> Simulator<'a> {
    pub fn new(
        hw: &'a Hardware,
        mapping: &MappingAssignment,
        qubit_count: usize,
        mode: LatencyMode,
    ) -> Result<Self, SimError> {
        let state = MachineState::new(
            &hw.arch,
            mapping,
            qubit_count,
            hw.entanglement.max_concurrent_per_module,
        )?;
        let cal = &hw.calibration;
        let (fidelity, raw_pairs) = distilled_fidelity(&hw.entanglement);
        Ok(Self {
            hw,
            state,
            ops: Vec::new(),
            rng: match mode {
                LatencyMode::Expected => None,
                LatencyMode::Sampled { seed } => Some(ChaCha8Rng::seed_from_u64(seed)),
            },
            clock: 0,
            xbar_us: xbar_latency(hw.arch.governing_switch_ports(), cal)?,
            non_xbar_us: non_xbar_latency(&hw.entanglement, cal)?,
            expected_rounds: expected_rounds(hw.entanglement.concurrency, cal.attempt_success_probability)?,
            pair_infidelity: 1.0 - fidelity,
            raw_pairs,
            distill_us: f64::from(hw.entanglement.distillation_iterations)
                * (cal.gate2.time_us + cal.measurement.time_us),
        })
    }

    pub fn state(&self) -> &MachineState {
        &self.state
    }

    pub fn ops(&self) -> &[PhysicalOp] {
        &self.ops
    }

    fn trap_loc(t: TrapRef) -> Location {
        Location::Trap {
            module: t.module,
            qccd: t.qccd,
            trap: t.trap,
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn push(
        &mut self,
        kind: OpKind,
        location: Location,
        qubits: Vec<usize>,
        start_us: f64,
        cost: OpCost,
        gate: usize,
    ) -> f64 {
        let op = PhysicalOp {
            kind,
            location,
            qubits,
            start_us,
            duration_us: cost.time_us,
            infidelity: cost.infidelity,
            raw_pairs: 0,
            gate: Some(gate),
        };
        let end = op.end_us();
        self.ops.push(op);
        end
    }

    /// Split, shuttle and merge `q` into trap `to`, crossing matter-links
    /// when the QCCD changes.
    fn move_qubit(&mut self, q: usize, to: TrapRef, gate: usize) {
        let from = self.state.location(q);
        if from == to {
            return;
        }
        let cal = self.hw.calibration.clone();
        let mut t = self.state.qubit_ready[q];
        t = self.push(OpKind::Split, Self::trap_loc(from), vec![q], t, cal.split_merge, gate);
        if from.qccd != to.qccd {
            let module = self.hw.arch.module(from.module);
            let path = module.path(from.qccd, to.qccd);
            let hops: Vec<(usize, usize, usize)> = path
                .windows(2)
                .map(|w| (w[0], w[1], module.link_index(w[0], w[1]).expect("path follows links")))
                .collect();
            for (i, (u, _v, link)) in hops.into_iter().enumerate() {
                let here = Location::Trap {
                    module: from.module,
                    qccd: u,
                    trap: if i == 0 { from.trap } else { 0 },
                };
                t = self.push(OpKind::ShuttleStep, here, vec![q], t, cal.shuttle_step, gate);
                for _ in 0..self.hw.routing.x_junction_per_hop {
                    t = self.push(OpKind::XJunction, here, vec![q], t, cal.x_junction, gate);
                }
                let channels = &self.state.link_free[from.module][link];
                let channel = earliest(channels);
                let start = t.max(channels[channel]);
                let loc = Location::Link {
                    module: from.module,
                    link,
                    channel,
                };
                t = self.push(OpKind::MatterLink, loc, vec![q], start, cal.matter_link, gate);
                self.state.link_free[from.module][link][channel] = t;
            }
        }
        t = self.push(
            OpKind::ShuttleStep,
            Self::trap_loc(to),
            vec![q],
            t,
            cal.shuttle_step,
            gate,
        );
        t = self.push(OpKind::Merge, Self::trap_loc(to), vec![q], t, cal.split_merge, gate);
        self.state.qubit_ready[q] = t;
        self.state.relocate(q, to);
    }

    /// Frees a slot in `target` by evicting its least recently used resident
    /// outside `protect`: first to the emptiest other trap of the same QCCD,
    /// then to the emptiest trap elsewhere in the module.
    fn make_room(&mut self, target: TrapRef, protect: &[usize], gate: usize) -> Result<(), SimError> {
        if self.state.has_room(target) {
            return Ok(());
        }
        let victim = self
            .state
            .residents(target)
            .iter()
            .copied()
            .filter(|q| !protect.contains(q))
            .min_by_key(|&q| (self.state.last_touch[q], q))
            .ok_or_else(|| SimError::Unroutable {
                gate,
                reason: format!("trap {target:?} is full of gate operands"),
            })?;
        let emptiest = |cands: Vec<TrapRef>| {
            cands
                .into_iter()
                .filter(|&t| t != target && self.state.has_room(t))
                .min_by_key(|&t| (self.state.occupancy(t), t))
        };
        let same_qccd = emptiest(self.state.traps_in(target.module, target.qccd).collect());
        let dest = same_qccd.or_else(|| {
            let module = self.hw.arch.module(target.module);
            emptiest(
                (0..module.qccd_count())
                    .flat_map(|c| self.state.traps_in(target.module, c))
                    .collect(),
            )
        });
        let dest = dest.ok_or_else(|| SimError::Unroutable {
            gate,
            reason: format!("module {} has no free trap slot", target.module),
        })?;
        self.move_qubit(victim, dest, gate);
        Ok(())
    }

    /// Brings `q` into a port-attached QCCD of its module.
    fn move_to_ports(&mut self, q: usize, protect: &[usize], gate: usize) -> Result<(), SimError> {
        let here = self.state.location(q);
        let module = self.hw.arch.module(here.module);
        if module.qccds[here.qccd].port_attached {
            return Ok(());
        }
        let target_qccd = module
            .port_qccds()
            .into_iter()
            .min_by_key(|&c| (module.path(here.qccd, c).len(), c))
            .expect("validated modules have ports");
        let traps: Vec<TrapRef> = self.state.traps_in(here.module, target_qccd).collect();
        let target = traps
            .iter()
            .copied()
            .filter(|&t| self.state.has_room(t))
            .min_by_key(|&t| (self.state.occupancy(t), t))
            .unwrap_or(traps[0]);
        self.make_room(target, protect, gate)?;
        self.move_qubit(q, target, gate);
        Ok(())
    }

    fn entangle_duration(&mut self) -> f64 {
        let Some(rng) = self.rng.as_mut() else {
            return self.xbar_us + self.non_xbar_us;
        };
        let cal = &self.hw.calibration;
        let model = &self.hw.entanglement;
        let per_round = 1.0 - (1.0 - cal.attempt_success_probability).powi(model.concurrency as i32);
        let rounds = if per_round >= 1.0 {
            1.0
        } else {
            1.0 + Geometric::new(per_round).expect("probability in (0, 1)").sample(rng) as f64
        };
        let non_xbar = match model.override_for(model.concurrency) {
            Some(v) => v * rounds / self.expected_rounds,
            None => cal.cooling_us + cal.attempt_us * rounds,
        };
        self.xbar_us + non_xbar
    }

    fn remote_gate(&mut self, a: usize, b: usize, gate: usize) -> Result<(), SimError> {
        let issue = self.state.qubit_ready[a].max(self.state.qubit_ready[b]);
        self.move_to_ports(a, &[a, b], gate)?;
        self.move_to_ports(b, &[a, b], gate)?;
        let (ma, mb) = (self.state.location(a).module, self.state.location(b).module);
        let sa = earliest(&self.state.slot_free[ma]);
        let sb = earliest(&self.state.slot_free[mb]);
        let mut best = (0, 0);
        for (s, paths) in self.state.path_free.iter().enumerate() {
            let p = earliest(paths);
            if paths[p] < self.state.path_free[best.0][best.1] {
                best = (s, p);
            }
        }
        let start = issue
            .max(self.state.slot_free[ma][sa])
            .max(self.state.slot_free[mb][sb])
            .max(self.state.path_free[best.0][best.1]);
        let duration = self.entangle_duration();
        let loc = Location::Switch {
            switch: best.0,
            from: ma,
            to: mb,
        };
        self.ops.push(PhysicalOp {
            kind: OpKind::Entangle,
            location: loc,
            qubits: Vec::new(),
            start_us: start,
            duration_us: duration,
            infidelity: self.pair_infidelity,
            raw_pairs: self.raw_pairs,
            gate: Some(gate),
        });
        let linked = start + duration;
        self.state.path_free[best.0][best.1] = linked;
        let distilled = self.push(
            OpKind::Distill,
            loc,
            Vec::new(),
            linked,
            OpCost::new(self.distill_us, 0.0),
            gate,
        );
        self.state.slot_free[ma][sa] = distilled;
        self.state.slot_free[mb][sb] = distilled;

        let cal = self.hw.calibration.clone();
        let mut t = distilled.max(self.state.qubit_ready[a]).max(self.state.qubit_ready[b]);
        for q in [a, b] {
            let here = Self::trap_loc(self.state.location(q));
            t = self.push(OpKind::TeleportLocal, here, vec![q], t, cal.gate2, gate);
            t = self.push(OpKind::Measure, here, vec![q], t, cal.measurement, gate);
        }
        self.state.qubit_ready[a] = t;
        self.state.qubit_ready[b] = t;
        Ok(())
    }

    fn local_gate(&mut self, a: usize, b: usize, gate: usize) -> Result<(), SimError> {
        let (la, lb) = (self.state.location(a), self.state.location(b));
        if la != lb {
            if self.state.has_room(lb) {
                self.move_qubit(a, lb, gate);
            } else if self.state.has_room(la) {
                self.move_qubit(b, la, gate);
            } else {
                self.make_room(lb, &[a, b], gate)?;
                self.move_qubit(a, lb, gate);
            }
        }
        let here = self.state.location(b);
        let start = self.state.qubit_ready[a].max(self.state.qubit_ready[b]);
        let cost = self.hw.calibration.gate2;
        let end = self.push(OpKind::Gate2, Self::trap_loc(here), vec![a, b], start, cost, gate);
        self.state.qubit_ready[a] = end;
        self.state.qubit_ready[b] = end;
        Ok(())
    }

    /// Emits and schedules the ops for one gate; returns them.
    pub fn route_gate(&mut self, index: usize, gate: &Gate) -> Result<&[PhysicalOp], SimError> {
        let first = self.ops.len();
        self.clock += 1;
        for &q in gate.operands() {
            if q >= self.state.qubit_count() {
                return Err(SimError::Unroutable {
                    gate: index,
                    reason: format!("operand {q} is not mapped"),
                });
            }
        }
        match gate.kind() {
            GateKind::OneQubit | GateKind::Measurement => {
                let q = gate.operands()[0];
                let (kind, cost) = if gate.kind() == GateKind::OneQubit {
                    (OpKind::Gate1, self.hw.calibration.gate1)
                } else {
                    (OpKind::Measure, self.hw.calibration.measurement)
                };
                let here = Self::trap_loc(self.state.location(q));
                let start = self.state.qubit_ready[q];
                self.state.qubit_ready[q] = self.push(kind, here, vec![q], start, cost, index);
            }
            GateKind::TwoQubit => {
                let (a, b) = gate.pair().expect("two-qubit gate");
                if self.state.location(a).module == self.state.location(b).module {
                    self.local_gate(a, b, index)?;
                } else {
                    self.remote_gate(a, b, index)?;
                }
            }
        }
        for &q in gate.operands() {
            self.state.last_touch[q] = self.clock;
        }
        Ok(&self.ops[first..])
    }

    /// Per-gate minimum latency assuming no contention and co-resident
    /// operands.
    fn min_gate_latency(&self, gate: &Gate, module_of: &[usize]) -> f64 {
        let cal = &self.hw.calibration;
        match gate.kind() {
            GateKind::OneQubit => cal.gate1.time_us,
            GateKind::Measurement => cal.measurement.time_us,
            GateKind::TwoQubit => {
                let (a, b) = gate.pair().expect("two-qubit gate");
                if module_of[a] == module_of[b] {
                    cal.gate2.time_us
                } else {
                    let entangle = match self.rng {
                        None => self.xbar_us + self.non_xbar_us,
                        // Shortest possible draw: one attempt round.
                        Some(_) => {
                            let model = &self.hw.entanglement;
                            self.xbar_us
                                + match model.override_for(model.concurrency) {
                                    Some(v) => v / self.expected_rounds,
                                    None => cal.cooling_us + cal.attempt_us,
                                }
                        }
                    };
                    entangle + self.distill_us + 2.0 * (cal.gate2.time_us + cal.measurement.time_us)
                }
            }
        }
    }
}

/// Runs `circuit` slice by slice, lowest gate index first within a slice.
pub fn simulate(
    circuit: &Circuit,
    mapping: &MappingAssignment,
    hw: &Hardware,
    options: &SimOptions,
) -> Result<Execution, SimError> {
    let n = circuit.qubit_count();
    let mut sim = Simulator::new(hw, mapping, n, options.latency_mode)?;
    let module_of: Vec<usize> = (0..n).map(|q| mapping.module_of(q)).collect();
    let slices = time_slice(circuit);
    let mut chain = vec![0.0f64; n];
    let mut timeline = Vec::with_capacity(slices.len());
    let mut remote_gates = 0;
    for slice in &slices {
        let mut span: Option<(f64, f64)> = None;
        for &g in &slice.gate_indices {
            let gate = &circuit.gates()[g];
            let ready = gate.operands().iter().map(|&q| chain[q]).fold(0.0, f64::max);
            let done = ready + sim.min_gate_latency(gate, &module_of);
            for &q in gate.operands() {
                chain[q] = done;
            }
            if let Some((a, b)) = gate.pair() {
                if module_of[a] != module_of[b] {
                    remote_gates += 1;
                }
            }
            let ops = sim.route_gate(g, gate)?;
            for op in ops {
                span = Some(match span {
                    None => (op.start_us, op.end_us()),
                    Some((s, e)) => (s.min(op.start_us), e.max(op.end_us())),
                });
            }
            if options.check_invariants {
                sim.state
                    .check_conservation()
                    .map_err(|message| SimError::Invariant { gate: g, message })?;
            }
        }
        let (start_us, end_us) = span.unwrap_or((0.0, 0.0));
        timeline.push(SliceSpan {
            slice: slice.index,
            start_us,
            end_us,
        });
    }
    let ops = sim.ops;
    let makespan = ops.iter().map(PhysicalOp::end_us).fold(0.0, f64::max);
    let mut op_counts = BTreeMap::new();
    for op in &ops {
        *op_counts.entry(op.kind).or_insert(0) += 1;
    }
    let entangle_spans: Vec<(f64, f64)> = ops
        .iter()
        .filter(|o| o.kind == OpKind::Entangle)
        .map(|o| (o.start_us, o.end_us()))
        .collect();
    let photonic_share = if makespan > 0.0 {
        union_length(entangle_spans) / makespan
    } else {
        0.0
    };
    let report = ExecutionReport {
        latency_us: makespan,
        matter_link_crossings: op_counts.get(&OpKind::MatterLink).copied().unwrap_or(0),
        entanglements: op_counts.get(&OpKind::Entangle).copied().unwrap_or(0),
        raw_pairs: ops.iter().map(|o| o.raw_pairs).sum(),
        remote_gates,
        photonic_share,
        fidelity: estimate_fidelity(&ops, makespan, n, &hw.calibration),
        critical_path_us: chain.iter().copied().fold(0.0, f64::max),
        timeline,
        op_counts,
    };
    Ok(Execution { report, ops })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::Placement;

    fn desk() -> Hardware {
        Hardware::preset("desk-baseline").unwrap()
    }

    fn mapping(places: &[(usize, usize, usize)]) -> MappingAssignment {
        MappingAssignment::new(
            places
                .iter()
                .map(|&(module, qccd, slot)| Placement { module, qccd, slot })
                .collect(),
        )
        .unwrap()
    }

    fn run(c: &Circuit, m: &MappingAssignment, hw: &Hardware) -> Execution {
        simulate(c, m, hw, &SimOptions::default()).unwrap()
    }

    #[test]
    fn empty_circuit() {
        let c = Circuit::new(2).unwrap();
        let e = run(&c, &mapping(&[(0, 0, 0), (0, 0, 1)]), &desk());
        assert_eq!(e.report.latency_us, 0.0);
        assert_eq!(e.report.fidelity, 1.0);
    }

    #[test]
    fn co_resident_pair() {
        let c = Circuit::from_gates(2, vec![Gate::two("cx", 0, 1)]).unwrap();
        let e = run(&c, &mapping(&[(0, 0, 0), (0, 0, 1)]), &desk());
        assert_eq!(e.ops.len(), 1);
        assert_eq!(e.report.latency_us, 100.0);
        assert!((e.report.fidelity - (1.0 - 8e-4)).abs() < 1e-12);
    }

    #[test]
    fn disjoint_pairs_run_in_parallel() {
        let c = Circuit::from_gates(4, vec![Gate::two("cx", 0, 1), Gate::two("cx", 2, 3)]).unwrap();
        let e = run(&c, &mapping(&[(0, 0, 0), (0, 0, 1), (0, 0, 2), (0, 0, 3)]), &desk());
        assert_eq!(e.report.latency_us, 100.0);
    }

    #[test]
    fn adjacent_qccds_cross_one_link() {
        let c = Circuit::from_gates(2, vec![Gate::two("cx", 0, 1)]).unwrap();
        let e = run(&c, &mapping(&[(0, 0, 0), (0, 1, 0)]), &desk());
        let kinds: Vec<OpKind> = e.ops.iter().map(|o| o.kind).collect();
        assert_eq!(
            kinds,
            vec![
                OpKind::Split,
                OpKind::ShuttleStep,
                OpKind::XJunction,
                OpKind::MatterLink,
                OpKind::ShuttleStep,
                OpKind::Merge,
                OpKind::Gate2
            ]
        );
        assert_eq!(e.report.matter_link_crossings, 1);
        let link = e.ops.iter().find(|o| o.kind == OpKind::MatterLink).unwrap();
        assert_eq!(link.duration_us, 400.0);
        assert_eq!(e.report.latency_us, 380.0 + 5.0 + 100.0 + 400.0 + 5.0 + 380.0 + 100.0);
    }

    #[test]
    fn same_qccd_other_trap() {
        let c = Circuit::from_gates(2, vec![Gate::two("cx", 0, 1)]).unwrap();
        // Slot 6 is the first slot of trap 1 with 6-ion traps.
        let e = run(&c, &mapping(&[(0, 0, 0), (0, 0, 6)]), &desk());
        let kinds: Vec<OpKind> = e.ops.iter().map(|o| o.kind).collect();
        assert_eq!(
            kinds,
            vec![OpKind::Split, OpKind::ShuttleStep, OpKind::Merge, OpKind::Gate2]
        );
    }

    #[test]
    fn remote_gate_uses_one_distilled_pair() {
        let c = Circuit::from_gates(2, vec![Gate::two("cx", 0, 1)]).unwrap();
        let hw = desk();
        let e = run(&c, &mapping(&[(0, 2, 0), (1, 3, 0)]), &hw);
        assert_eq!(e.report.entanglements, 1);
        assert_eq!(e.report.raw_pairs, 8);
        assert_eq!(e.report.remote_gates, 1);
        let ent = e.ops.iter().find(|o| o.kind == OpKind::Entangle).unwrap();
        assert_eq!(ent.duration_us, 7980.0);
        assert!((ent.infidelity - 0.007).abs() < 1e-12);
        assert_eq!(e.report.count(OpKind::TeleportLocal), 2);
        assert_eq!(e.report.count(OpKind::Measure), 2);
        assert_eq!(e.report.latency_us, 7980.0 + 1500.0 + 1000.0);
        assert_eq!(e.report.latency_us, e.report.critical_path_us);
        assert!((e.report.photonic_share - 7980.0 / 10480.0).abs() < 1e-12);
    }

    #[test]
    fn remote_operands_walk_to_the_ports() {
        let c = Circuit::from_gates(2, vec![Gate::two("cx", 0, 1)]).unwrap();
        let e = run(&c, &mapping(&[(0, 0, 0), (1, 1, 0)]), &desk());
        assert_eq!(e.report.matter_link_crossings, 2);
        let ent = e.ops.iter().find(|o| o.kind == OpKind::Entangle).unwrap();
        // Entanglement overlaps the walk.
        assert_eq!(ent.start_us, 0.0);
    }

    #[test]
    fn module_entanglement_limit() {
        let gates = (0..3).map(|i| Gate::two("cx", i, i + 3)).collect();
        let c = Circuit::from_gates(6, gates).unwrap();
        let m = mapping(&[(0, 2, 0), (0, 2, 1), (0, 2, 2), (1, 2, 0), (1, 2, 1), (1, 2, 2)]);
        let e = run(&c, &m, &desk());
        let starts: Vec<f64> = e
            .ops
            .iter()
            .filter(|o| o.kind == OpKind::Entangle)
            .map(|o| o.start_us)
            .collect();
        assert_eq!(starts, vec![0.0, 0.0, 7980.0 + 1500.0]);
    }

    #[test]
    fn full_trap_triggers_eviction() {
        let mut hw = desk();
        let mut modules = hw.arch.modules().to_vec();
        for m in &mut modules {
            m.trap_capacity = 4;
            for q in &mut m.qccds {
                q.data_capacity = 8;
            }
        }
        hw.arch = crate::arch::ArchitectureSpec::new(modules, hw.arch.switch().clone()).unwrap();
        // Trap t0 of QCCDs 0 and 1 both start full.
        let c = Circuit::from_gates(8, vec![Gate::two("cx", 0, 4)]).unwrap();
        let places: Vec<(usize, usize, usize)> = (0..8).map(|q| (0, q / 4, q % 4)).collect();
        let e = run(&c, &mapping(&places), &hw);
        assert_eq!(e.report.count(OpKind::Split), 2);
        assert_eq!(e.report.count(OpKind::Gate2), 1);
        // Qubit 5 is the lowest-index least recently used resident.
        let evicted = e.ops.iter().find(|o| o.kind == OpKind::Split).unwrap();
        assert_eq!(evicted.qubits, vec![5]);
        let merge = e.ops.iter().find(|o| o.kind == OpKind::Merge).unwrap();
        assert_eq!(
            merge.location,
            Location::Trap {
                module: 0,
                qccd: 1,
                trap: 1
            }
        );
    }

    #[test]
    fn sampled_mode_with_certain_success() {
        let mut hw = desk();
        hw.calibration.attempt_success_probability = 1.0;
        hw.entanglement.calibrated_non_xbar.clear();
        let c = Circuit::from_gates(2, vec![Gate::two("cx", 0, 1)]).unwrap();
        let m = mapping(&[(0, 2, 0), (1, 2, 0)]);
        for seed in [1, 99, 12345] {
            let opts = SimOptions {
                latency_mode: LatencyMode::Sampled { seed },
                check_invariants: true,
            };
            let e = simulate(&c, &m, &hw, &opts).unwrap();
            let ent = e.ops.iter().find(|o| o.kind == OpKind::Entangle).unwrap();
            assert_eq!(ent.duration_us, 5230.0 + 100.0 + 500.0);
        }
    }

    #[test]
    fn sampled_mode_is_reproducible() {
        let hw = desk();
        let gates = (0..6).map(|i| Gate::two("cx", i % 2, 2 + i % 2)).collect();
        let c = Circuit::from_gates(4, gates).unwrap();
        let m = mapping(&[(0, 2, 0), (0, 2, 1), (1, 2, 0), (1, 2, 1)]);
        let opts = SimOptions {
            latency_mode: LatencyMode::Sampled { seed: 5 },
            check_invariants: true,
        };
        let a = simulate(&c, &m, &hw, &opts).unwrap();
        let b = simulate(&c, &m, &hw, &opts).unwrap();
        assert_eq!(a, b);
        assert!(a.report.latency_us >= a.report.critical_path_us);
    }

    #[test]
    fn unmapped_qubits_are_rejected() {
        let c = Circuit::from_gates(3, vec![Gate::two("cx", 0, 2)]).unwrap();
        let err = simulate(&c, &mapping(&[(0, 0, 0), (0, 0, 1)]), &desk(), &SimOptions::default());
        assert!(matches!(err, Err(SimError::Mapping(_))));
    }
}
