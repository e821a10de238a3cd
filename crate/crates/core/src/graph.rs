//! Qubit interaction graphs with exponentially decayed lookahead weights.
//!
//! The graph for slice `t` gives every pair that interacts in `t` the big
//! weight `L`, and every other pair the sum over later slices `m` in which
//! it interacts of `2^(-(m - t) / sigma)`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::TimeSlice;

/// Weights below this are dropped from the edge set.
pub const PRUNE_BELOW: f64 = 1e-15;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("decay scale sigma must be positive and finite, got {0}")]
    BadSigma(f64),
    #[error("big weight L must exceed the slice count {slices}, got {weight}")]
    BigWeightTooSmall { weight: f64, slices: usize },
    #[error("slice index {t} out of range for {slices} slices")]
    SliceOutOfRange { t: usize, slices: usize },
    #[error("grouping covers {got} nodes, graph has {expected}")]
    PartialGrouping { expected: usize, got: usize },
    #[error("qubit q{qubit} out of range for a {nodes}-node graph")]
    NodeOutOfRange { qubit: usize, nodes: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LookaheadConfig {
    sigma: f64,
    big_weight: f64,
}

impl LookaheadConfig {
    /// `big_weight` must exceed `slice_count`: no lookahead sum can then
    /// reach it, since each of the fewer than `T` later slices adds less than 1.
    pub fn new(sigma: f64, big_weight: f64, slice_count: usize) -> Result<Self, GraphError> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(GraphError::BadSigma(sigma));
        }
        if !big_weight.is_finite() || big_weight <= slice_count as f64 {
            return Err(GraphError::BigWeightTooSmall {
                weight: big_weight,
                slices: slice_count,
            });
        }
        Ok(Self { sigma, big_weight })
    }

    /// Decay scale `sigma` with `L = 2T + 1`.
    pub fn with_sigma(sigma: f64, slice_count: usize) -> Result<Self, GraphError> {
        Self::new(sigma, 2.0 * slice_count as f64 + 1.0, slice_count)
    }

    /// `sigma = 1` slice, `L = 2T + 1`.
    pub fn default_for(slice_count: usize) -> Self {
        Self::with_sigma(1.0, slice_count).expect("defaults are valid")
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn big_weight(&self) -> f64 {
        self.big_weight
    }

    pub fn decay(&self, distance: usize) -> f64 {
        (-(distance as f64) / self.sigma).exp2()
    }
}

/// Undirected weighted graph over qubits `0..n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QubitGraph {
    node_count: usize,
    origin_slice: usize,
    /// Keyed by `(i, j)` with `i < j`.
    edges: BTreeMap<(usize, usize), f64>,
}

impl QubitGraph {
    pub fn new(node_count: usize) -> Self {
        Self {
            node_count,
            origin_slice: 0,
            edges: BTreeMap::new(),
        }
    }

    pub fn from_edges(
        node_count: usize,
        edges: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self, GraphError> {
        let mut g = Self::new(node_count);
        for (i, j, w) in edges {
            g.add_weight(i, j, w)?;
        }
        Ok(g)
    }

    /// Adds `w` to the edge `(i, j)`. Self-edges are ignored.
    pub fn add_weight(&mut self, i: usize, j: usize, w: f64) -> Result<(), GraphError> {
        for q in [i, j] {
            if q >= self.node_count {
                return Err(GraphError::NodeOutOfRange {
                    qubit: q,
                    nodes: self.node_count,
                });
            }
        }
        if i != j && w != 0.0 {
            *self.edges.entry((i.min(j), i.max(j))).or_insert(0.0) += w;
        }
        Ok(())
    }

    fn set_weight(&mut self, i: usize, j: usize, w: f64) {
        self.edges.insert((i.min(j), i.max(j)), w);
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn origin_slice(&self) -> usize {
        self.origin_slice
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.edges.get(&(i.min(j), i.max(j))).copied().unwrap_or(0.0)
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.edges.iter().map(|(&(i, j), &w)| (i, j, w))
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.values().sum()
    }

    /// Row-major `n x n` symmetric weight matrix.
    pub fn dense(&self) -> Vec<f64> {
        let n = self.node_count;
        let mut m = vec![0.0; n * n];
        for (i, j, w) in self.edges() {
            m[i * n + j] = w;
            m[j * n + i] = w;
        }
        m
    }

    /// Graph on `nodes` (renumbered `0..nodes.len()` in the given order).
    pub fn induced(&self, nodes: &[usize]) -> QubitGraph {
        let index: BTreeMap<usize, usize> = nodes.iter().enumerate().map(|(k, &q)| (q, k)).collect();
        let mut g = QubitGraph::new(nodes.len());
        g.origin_slice = self.origin_slice;
        for (i, j, w) in self.edges() {
            if let (Some(&a), Some(&b)) = (index.get(&i), index.get(&j)) {
                g.set_weight(a, b, w);
            }
        }
        g
    }

    pub fn scaled(&self, factor: f64) -> QubitGraph {
        let mut g = self.clone();
        for w in g.edges.values_mut() {
            *w *= factor;
        }
        g
    }

    /// Dumps one `i j weight` line per edge, ascending by `(i, j)`.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("# nodes {} origin {}\n", self.node_count, self.origin_slice);
        for (i, j, w) in self.edges() {
            writeln!(out, "{i} {j} {w:e}").unwrap();
        }
        out
    }

    pub fn from_edge_list(text: &str) -> Result<Self, GraphError> {
        let err = |line, message: String| GraphError::Parse { line, message };
        let mut graph: Option<QubitGraph> = None;
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let body = raw.trim();
            if body.is_empty() {
                continue;
            }
            let fields: Vec<&str> = body.split_whitespace().collect();
            if let Some(rest) = body.strip_prefix('#') {
                let f: Vec<&str> = rest.split_whitespace().collect();
                if let ["nodes", nodes, "origin", origin] = f.as_slice() {
                    let mut g = QubitGraph::new(nodes.parse().map_err(|e| err(line, format!("bad node count: {e}")))?);
                    g.origin_slice = origin.parse().map_err(|e| err(line, format!("bad origin: {e}")))?;
                    graph = Some(g);
                }
                continue;
            }
            let g = graph
                .as_mut()
                .ok_or_else(|| err(line, "edge before `# nodes N origin T` header".into()))?;
            let [i, j, w] = fields.as_slice() else {
                return Err(err(line, format!("expected `i j weight`, got `{body}`")));
            };
            let parse_node = |s: &str| {
                s.parse::<usize>()
                    .map_err(|e| err(line, format!("bad node `{s}`: {e}")))
            };
            let (i, j) = (parse_node(i)?, parse_node(j)?);
            let w: f64 = w.parse().map_err(|e| err(line, format!("bad weight `{w}`: {e}")))?;
            g.add_weight(i, j, w).map_err(|e| err(line, e.to_string()))?;
        }
        graph.ok_or_else(|| err(1, "missing `# nodes N origin T` header".into()))
    }
}

/// Lookahead-weighted interaction graph for slice `t`.
pub fn build_lookahead_graph(
    qubit_count: usize,
    slices: &[TimeSlice],
    t: usize,
    cfg: &LookaheadConfig,
) -> Result<QubitGraph, GraphError> {
    let total = slices.len();
    if t >= total {
        return Err(GraphError::SliceOutOfRange { t, slices: total });
    }
    if cfg.big_weight <= total as f64 {
        return Err(GraphError::BigWeightTooSmall {
            weight: cfg.big_weight,
            slices: total,
        });
    }
    let mut g = QubitGraph::new(qubit_count);
    g.origin_slice = t;
    for slice in &slices[t + 1..] {
        let d = cfg.decay(slice.index - t);
        if d < PRUNE_BELOW {
            break;
        }
        for (i, j) in slice.interacting_pairs() {
            g.add_weight(i, j, d)?;
        }
    }
    for (i, j) in slices[t].interacting_pairs() {
        if i.max(j) >= qubit_count {
            return Err(GraphError::NodeOutOfRange {
                qubit: i.max(j),
                nodes: qubit_count,
            });
        }
        g.set_weight(i, j, cfg.big_weight);
    }
    g.edges.retain(|_, w| *w >= PRUNE_BELOW);
    Ok(g)
}

/// Collapses nodes into groups: group-edge weight is the sum of member-pair
/// weights, intra-group weight is dropped. `grouping[q]` is the group of `q`.
pub fn contract_graph(graph: &QubitGraph, grouping: &[usize]) -> Result<QubitGraph, GraphError> {
    if grouping.len() != graph.node_count {
        return Err(GraphError::PartialGrouping {
            expected: graph.node_count,
            got: grouping.len(),
        });
    }
    let groups = grouping.iter().max().map_or(0, |m| m + 1);
    let mut out = QubitGraph::new(groups);
    out.origin_slice = graph.origin_slice;
    for (i, j, w) in graph.edges() {
        out.add_weight(grouping[i], grouping[j], w)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{time_slice, Circuit, Gate};

    fn slices_of(n: usize, gates: Vec<Gate>) -> Vec<TimeSlice> {
        time_slice(&Circuit::from_gates(n, gates).unwrap())
    }

    #[test]
    fn single_future_interaction_at_sigma_distance() {
        // slice 0: (0,1); slice 1: (1,2); slice 2: (2,3) and later (0,3) is
        // pushed to slice 3 through qubit 3.
        let s = slices_of(
            4,
            vec![
                Gate::two("cx", 0, 1),
                Gate::one("h", 2),
                Gate::one("h", 2),
                Gate::two("cx", 2, 3),
            ],
        );
        assert_eq!(s.len(), 3);
        let cfg = LookaheadConfig::with_sigma(2.0, s.len()).unwrap();
        let g = build_lookahead_graph(4, &s, 0, &cfg).unwrap();
        assert_eq!(g.weight(2, 3), 0.5);
        assert_eq!(g.weight(0, 1), cfg.big_weight());
    }

    #[test]
    fn two_term_sum() {
        let s = slices_of(
            3,
            vec![
                Gate::one("h", 0),
                Gate::one("h", 2),
                Gate::two("cx", 0, 1),
                Gate::two("cx", 0, 1),
            ],
        );
        assert_eq!(s.len(), 3);
        let g = build_lookahead_graph(3, &s, 0, &LookaheadConfig::default_for(s.len())).unwrap();
        assert_eq!(g.weight(0, 1), 0.75);
        assert_eq!(g.weight(0, 2), 0.0);
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn current_slice_pairs_get_big_weight() {
        let s = slices_of(2, vec![Gate::two("cx", 0, 1), Gate::two("cx", 0, 1)]);
        let cfg = LookaheadConfig::default_for(s.len());
        let g = build_lookahead_graph(2, &s, 0, &cfg).unwrap();
        assert_eq!(g.weight(1, 0), cfg.big_weight());
        assert_eq!(cfg.big_weight(), 5.0);
        let g1 = build_lookahead_graph(2, &s, 1, &cfg).unwrap();
        assert_eq!(g1.weight(0, 1), cfg.big_weight());
    }

    #[test]
    fn config_and_range_errors() {
        assert_eq!(LookaheadConfig::new(0.0, 10.0, 3), Err(GraphError::BadSigma(0.0)));
        assert!(matches!(
            LookaheadConfig::new(1.0, 3.0, 3),
            Err(GraphError::BigWeightTooSmall { .. })
        ));
        let s = slices_of(2, vec![Gate::two("cx", 0, 1)]);
        assert_eq!(
            build_lookahead_graph(2, &s, 1, &LookaheadConfig::default_for(1)),
            Err(GraphError::SliceOutOfRange { t: 1, slices: 1 })
        );
        let small = LookaheadConfig::new(1.0, 1.5, 1).unwrap();
        let s3 = slices_of(2, vec![Gate::two("cx", 0, 1), Gate::two("cx", 0, 1)]);
        assert!(matches!(
            build_lookahead_graph(2, &s3, 0, &small),
            Err(GraphError::BigWeightTooSmall { .. })
        ));
    }

    #[test]
    fn contraction_cases() {
        let g = QubitGraph::from_edges(4, [(0, 2, 1.0), (1, 3, 2.0), (0, 1, 7.0)]).unwrap();
        assert_eq!(contract_graph(&g, &[0, 1, 2, 3]).unwrap(), g);
        assert_eq!(contract_graph(&g, &[0, 0, 0, 0]).unwrap().edge_count(), 0);
        let c = contract_graph(&g, &[0, 0, 1, 1]).unwrap();
        assert_eq!(c.edge_count(), 1);
        assert_eq!(c.weight(0, 1), 3.0);
        assert_eq!(
            contract_graph(&g, &[0, 0, 1]),
            Err(GraphError::PartialGrouping { expected: 4, got: 3 })
        );
    }

    #[test]
    fn edge_list_dump_reads_back() {
        let g = QubitGraph::from_edges(5, [(0, 4, 0.1), (1, 2, 1.0 / 3.0), (3, 4, 1e-14)]).unwrap();
        let text = g.to_edge_list();
        assert!(text.contains("1 2 3.333333333333333e-1"));
        assert_eq!(QubitGraph::from_edge_list(&text).unwrap(), g);
        assert!(QubitGraph::from_edge_list("0 1 2.0").is_err());
    }
}
