use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::kl::{k_way_labels, refine, Dense};
use super::PartitionError;
use crate::graph::{contract_graph, QubitGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionConfig {
    /// Modules.
    pub k: usize,
    /// Sub-partitions (data QCCDs) per module.
    pub j: usize,
    /// KL pass cap.
    pub p: usize,
    /// Pairwise refinement rounds per module.
    pub q: usize,
    /// Qubits per sub-partition.
    pub capacity: usize,
}

impl PartitionConfig {
    pub fn validate(&self, qubits: usize) -> Result<(), PartitionError> {
        if self.k == 0 || self.j == 0 || (self.k < 2 && self.j < 2) {
            return Err(PartitionError::Config(format!(
                "need k >= 2 or j >= 2 (k = {}, j = {})",
                self.k, self.j
            )));
        }
        if self.capacity == 0 {
            return Err(PartitionError::Config("capacity must be positive".into()));
        }
        if qubits > self.k * self.j * self.capacity {
            return Err(PartitionError::Config(format!(
                "{qubits} qubits exceed {} x {} x {} slots",
                self.k, self.j, self.capacity
            )));
        }
        Ok(())
    }
}

/// How each module's sub-partitions are initialised before refinement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SubInit {
    /// Recursive bisection of the module subgraph.
    Bisection,
    /// Externally communicating qubits packed into the first `seed_groups`
    /// sub-partitions, the rest shuffled.
    CommSeeded { seed_groups: usize, rng_seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubPartition {
    pub qubits: Vec<usize>,
    /// Contracted-graph weight from this sub-partition to other modules.
    pub comm_score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModulePartition {
    pub subs: Vec<SubPartition>,
}

impl ModulePartition {
    pub fn qubits(&self) -> Vec<usize> {
        let mut all: Vec<usize> = self.subs.iter().flat_map(|s| s.qubits.iter().copied()).collect();
        all.sort_unstable();
        all
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionTree {
    qubit_count: usize,
    modules: Vec<ModulePartition>,
}

impl PartitionTree {
    /// Builds a tree from explicit groups (module, then sub-partition) and
    /// scores every sub-partition against `graph`.
    pub fn from_groups(graph: &QubitGraph, groups: Vec<Vec<Vec<usize>>>) -> Result<Self, PartitionError> {
        let n = graph.node_count();
        let mut flat = vec![usize::MAX; n];
        let mut module_of_flat = Vec::new();
        for (m, subs) in groups.iter().enumerate() {
            for sub in subs {
                for &q in sub {
                    if q >= n || flat[q] != usize::MAX {
                        return Err(PartitionError::Config(format!(
                            "qubit {q} out of range or placed twice"
                        )));
                    }
                    flat[q] = module_of_flat.len();
                }
                module_of_flat.push(m);
            }
        }
        if let Some(q) = flat.iter().position(|&f| f == usize::MAX) {
            return Err(PartitionError::Config(format!("qubit {q} not placed")));
        }
        let mut scores = vec![0.0; module_of_flat.len()];
        if n > 0 {
            let contracted = contract_graph(graph, &flat)?;
            for (s, t, w) in contracted.edges() {
                if module_of_flat[s] != module_of_flat[t] {
                    scores[s] += w;
                    scores[t] += w;
                }
            }
        }
        let mut next = 0;
        let modules = groups
            .into_iter()
            .map(|subs| ModulePartition {
                subs: subs
                    .into_iter()
                    .map(|mut qubits| {
                        qubits.sort_unstable();
                        let comm_score = scores.get(next).copied().unwrap_or(0.0);
                        next += 1;
                        SubPartition { qubits, comm_score }
                    })
                    .collect(),
            })
            .collect();
        Ok(Self {
            qubit_count: n,
            modules,
        })
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    pub fn modules(&self) -> &[ModulePartition] {
        &self.modules
    }

    /// `(module, sub-partition)` of each qubit.
    pub fn locate(&self) -> Vec<(usize, usize)> {
        let mut out = vec![(0, 0); self.qubit_count];
        for (m, module) in self.modules.iter().enumerate() {
            for (s, sub) in module.subs.iter().enumerate() {
                for &q in &sub.qubits {
                    out[q] = (m, s);
                }
            }
        }
        out
    }

    pub fn module_labels(&self) -> Vec<usize> {
        self.locate().into_iter().map(|(m, _)| m).collect()
    }
}

/// Module-level k-way partition followed by a j-way split of each module.
pub fn hierarchical_partition(
    graph: &QubitGraph,
    cfg: &PartitionConfig,
    init: &SubInit,
) -> Result<PartitionTree, PartitionError> {
    cfg.validate(graph.node_count())?;
    let module_sets = module_level(graph, cfg);
    let groups: Vec<Vec<Vec<usize>>> = match *init {
        SubInit::Bisection => module_sets
            .par_iter()
            .map(|set| {
                let labels = k_way_labels(graph, set, cfg.j, cfg.p);
                let mut groups = group_by_label(set, &labels, cfg.j);
                pairwise_refine(graph, &mut groups, cfg.p, cfg.q);
                groups
            })
            .collect(),
        SubInit::CommSeeded { seed_groups, rng_seed } => {
            let seeded = comm_seeded_init(graph, &module_sets, cfg.j, seed_groups, rng_seed);
            seeded
                .into_par_iter()
                .map(|mut groups| {
                    pairwise_refine(graph, &mut groups, cfg.p, cfg.q);
                    groups
                })
                .collect()
        }
    };
    PartitionTree::from_groups(graph, groups)
}

/// Same module-level partition as [`hierarchical_partition`], but each
/// module is cut into contiguous index-ordered chunks without optimisation.
pub fn natural_order_tree(graph: &QubitGraph, cfg: &PartitionConfig) -> Result<PartitionTree, PartitionError> {
    cfg.validate(graph.node_count())?;
    let groups = module_level(graph, cfg)
        .into_iter()
        .map(|set| {
            let sizes = balanced_sizes(set.len(), cfg.j);
            let mut rest = set.as_slice();
            sizes
                .into_iter()
                .map(|s| {
                    let (head, tail) = rest.split_at(s);
                    rest = tail;
                    head.to_vec()
                })
                .collect()
        })
        .collect();
    PartitionTree::from_groups(graph, groups)
}

fn module_level(graph: &QubitGraph, cfg: &PartitionConfig) -> Vec<Vec<usize>> {
    let nodes: Vec<usize> = (0..graph.node_count()).collect();
    let labels = k_way_labels(graph, &nodes, cfg.k, cfg.p);
    group_by_label(&nodes, &labels, cfg.k)
}

fn group_by_label(nodes: &[usize], labels: &[usize], parts: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); parts];
    for (&v, &l) in nodes.iter().zip(labels) {
        out[l].push(v);
    }
    out
}

/// First `n % parts` groups get the extra element.
fn balanced_sizes(n: usize, parts: usize) -> Vec<usize> {
    (0..parts).map(|g| n / parts + usize::from(g < n % parts)).collect()
}

/// KL over the union of every pair of groups, keeping both sizes, for up to
/// `rounds` sweeps or until a sweep changes nothing.
fn pairwise_refine(graph: &QubitGraph, groups: &mut [Vec<usize>], p: usize, rounds: usize) {
    for _ in 0..rounds {
        let mut improved = false;
        for a in 0..groups.len() {
            for b in a + 1..groups.len() {
                if groups[a].is_empty() || groups[b].is_empty() {
                    continue;
                }
                let set: Vec<usize> = groups[a].iter().chain(&groups[b]).copied().collect();
                let dense = Dense::from_graph(graph, &set, set.len());
                let mut side: Vec<bool> = (0..set.len()).map(|i| i >= groups[a].len()).collect();
                let cuts = refine(&dense, &mut side, &vec![false; set.len()], p);
                if cuts.len() > 1 {
                    improved = true;
                    groups[a] = (0..set.len()).filter(|&i| !side[i]).map(|i| set[i]).collect();
                    groups[b] = (0..set.len()).filter(|&i| side[i]).map(|i| set[i]).collect();
                    groups[a].sort_unstable();
                    groups[b].sort_unstable();
                }
            }
        }
        if !improved {
            break;
        }
    }
}

/// Per-module starting split into `j` balanced groups. Qubits with nonzero
/// weight to other modules are ranked (heaviest first, lowest index on ties)
/// and packed into the first `seed_groups` groups; everything else is
/// shuffled into the remaining slots.
pub fn comm_seeded_init(
    graph: &QubitGraph,
    modules: &[Vec<usize>],
    j: usize,
    seed_groups: usize,
    rng_seed: u64,
) -> Vec<Vec<Vec<usize>>> {
    let mut module_of = vec![usize::MAX; graph.node_count()];
    for (m, set) in modules.iter().enumerate() {
        for &q in set {
            module_of[q] = m;
        }
    }
    let mut external = vec![0.0; graph.node_count()];
    for (u, v, w) in graph.edges() {
        if module_of[u] != module_of[v] {
            external[u] += w;
            external[v] += w;
        }
    }
    modules
        .iter()
        .enumerate()
        .map(|(m, set)| {
            let sizes = balanced_sizes(set.len(), j);
            let mut groups: Vec<Vec<usize>> = vec![Vec::new(); j];
            let mut ranked: Vec<usize> = set.iter().copied().filter(|&q| external[q] > 0.0).collect();
            ranked.sort_by(|&a, &b| external[b].total_cmp(&external[a]).then(a.cmp(&b)));
            let mut placed = vec![false; graph.node_count()];
            let mut g = 0;
            for q in ranked {
                while g < seed_groups.min(j) && groups[g].len() == sizes[g] {
                    g += 1;
                }
                if g >= seed_groups.min(j) {
                    break;
                }
                groups[g].push(q);
                placed[q] = true;
            }
            let mut rest: Vec<usize> = set.iter().copied().filter(|&q| !placed[q]).collect();
            let mut rng = ChaCha8Rng::seed_from_u64(rng_seed ^ (m as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            rest.shuffle(&mut rng);
            let mut it = rest.into_iter();
            for (grp, &size) in groups.iter_mut().zip(&sizes) {
                while grp.len() < size {
                    grp.push(it.next().expect("sizes sum to the module size"));
                }
                grp.sort_unstable();
            }
            groups
        })
        .collect()
}
