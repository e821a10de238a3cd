use super::PartitionError;
use crate::graph::QubitGraph;

/// Result of a two-way split. Sizes of `a` and `b` differ by at most one.
#[derive(Debug, Clone, PartialEq)]
pub struct Bipartition {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    pub cut: f64,
    /// Cut before the first pass, then after every applied pass.
    pub pass_cuts: Vec<f64>,
}

/// Square weight matrix over a node subset; indices past the real nodes are
/// zero-weight dummies.
pub(crate) struct Dense {
    n: usize,
    w: Vec<f64>,
}

impl Dense {
    pub(crate) fn from_graph(graph: &QubitGraph, nodes: &[usize], padded: usize) -> Self {
        let n = padded.max(nodes.len());
        let mut w = vec![0.0; n * n];
        let mut local = vec![usize::MAX; graph.node_count()];
        for (i, &v) in nodes.iter().enumerate() {
            local[v] = i;
        }
        for (u, v, x) in graph.edges() {
            let (i, j) = (local[u], local[v]);
            if i != usize::MAX && j != usize::MAX {
                w[i * n + j] = x;
                w[j * n + i] = x;
            }
        }
        Self { n, w }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.w[i * self.n + j]
    }

    fn cut(&self, side: &[bool]) -> f64 {
        let mut c = 0.0;
        for i in 0..self.n {
            for j in i + 1..self.n {
                if side[i] != side[j] {
                    c += self.at(i, j);
                }
            }
        }
        c
    }

    fn total(&self) -> f64 {
        self.w.iter().sum::<f64>() / 2.0
    }
}

/// Swap-based KL passes over `side` (false = A, true = B). Side sizes never
/// change and pinned nodes never move. Returns the cut before the first pass
/// and after each applied pass.
pub(crate) fn refine(w: &Dense, side: &mut [bool], pinned: &[bool], p: usize) -> Vec<f64> {
    let n = w.n;
    let tol = 1e-12 * (w.total() + 1.0);
    let mut cuts = vec![w.cut(side)];
    for _ in 0..p {
        let mut d = vec![0.0; n];
        for (i, di) in d.iter_mut().enumerate() {
            for j in 0..n {
                if j != i {
                    let x = w.at(i, j);
                    *di += if side[i] != side[j] { x } else { -x };
                }
            }
        }
        let mut locked = pinned.to_vec();
        let mut swaps = Vec::new();
        let mut gains = Vec::new();
        loop {
            let mut best: Option<(f64, usize, usize)> = None;
            for a in 0..n {
                if locked[a] || side[a] {
                    continue;
                }
                for b in 0..n {
                    if locked[b] || !side[b] {
                        continue;
                    }
                    let g = d[a] + d[b] - 2.0 * w.at(a, b);
                    if best.is_none_or(|(bg, _, _)| g > bg) {
                        best = Some((g, a, b));
                    }
                }
            }
            let Some((g, a, b)) = best else { break };
            locked[a] = true;
            locked[b] = true;
            for x in 0..n {
                if locked[x] {
                    continue;
                }
                let (wa, wb) = (w.at(x, a), w.at(x, b));
                // a moves to B and b moves to A.
                if side[x] {
                    d[x] += 2.0 * wb - 2.0 * wa;
                } else {
                    d[x] += 2.0 * wa - 2.0 * wb;
                }
            }
            swaps.push((a, b));
            gains.push(g);
        }
        let mut best_k = 0;
        let mut best_g = 0.0;
        let mut acc = 0.0;
        for (k, g) in gains.iter().enumerate() {
            acc += g;
            if acc > best_g {
                best_g = acc;
                best_k = k + 1;
            }
        }
        if best_k == 0 || best_g <= tol {
            break;
        }
        for &(a, b) in &swaps[..best_k] {
            side[a] = true;
            side[b] = false;
        }
        let c = w.cut(side);
        if c >= *cuts.last().unwrap() {
            // Rounding left no real improvement; undo and stop.
            for &(a, b) in &swaps[..best_k] {
                side[a] = false;
                side[b] = true;
            }
            break;
        }
        cuts.push(c);
    }
    cuts
}

/// Balanced KL bisection. `seed` lists the nodes that start in A and must
/// hold `n / 2` or `(n + 1) / 2` of them; by default A starts as the lowest
/// `n / 2` indices. An odd node count is padded with one zero-weight dummy.
pub fn kl_bipartition(graph: &QubitGraph, p: usize, seed: Option<&[usize]>) -> Result<Bipartition, PartitionError> {
    let n = graph.node_count();
    let padded = n + n % 2;
    let half = padded / 2;
    let mut side = vec![true; padded];
    match seed {
        Some(s) => {
            if s.len() != n / 2 && s.len() != n.div_ceil(2) {
                return Err(PartitionError::Seed(format!(
                    "side A has {} nodes, expected {} or {}",
                    s.len(),
                    n / 2,
                    n.div_ceil(2)
                )));
            }
            for &v in s {
                if v >= n {
                    return Err(PartitionError::Seed(format!("node {v} out of range")));
                }
                if !side[v] {
                    return Err(PartitionError::Seed(format!("node {v} listed twice")));
                }
                side[v] = false;
            }
            if s.len() < half {
                side[n] = false;
            }
        }
        None => side[..half].iter_mut().for_each(|x| *x = false),
    }
    let nodes: Vec<usize> = (0..n).collect();
    let dense = Dense::from_graph(graph, &nodes, padded);
    let pass_cuts = refine(&dense, &mut side, &vec![false; padded], p);
    let a: Vec<usize> = (0..n).filter(|&v| !side[v]).collect();
    let b: Vec<usize> = (0..n).filter(|&v| side[v]).collect();
    Ok(Bipartition {
        a,
        b,
        cut: *pass_cuts.last().unwrap(),
        pass_cuts,
    })
}

/// Best of several seeded runs; the earliest seed wins ties.
pub fn kl_multistart(graph: &QubitGraph, p: usize, seeds: &[Vec<usize>]) -> Result<Bipartition, PartitionError> {
    if seeds.is_empty() {
        return kl_bipartition(graph, p, None);
    }
    let mut best: Option<Bipartition> = None;
    for s in seeds {
        let r = kl_bipartition(graph, p, Some(s))?;
        if best.as_ref().is_none_or(|b| r.cut < b.cut) {
            best = Some(r);
        }
    }
    Ok(best.unwrap())
}

/// Every distinct balanced split of `n` nodes, each given as its A side.
/// Exponential in `n`; meant for exhaustive checks on tiny graphs.
pub fn balanced_seed_splits(n: usize) -> Vec<Vec<usize>> {
    fn combos(start: usize, n: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for v in start..=n - left {
            cur.push(v);
            combos(v + 1, n, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n < 2 {
        out.push((0..n / 2).collect());
        return out;
    }
    if n.is_multiple_of(2) {
        // Fix node 0 in A so complements are not repeated.
        let mut cur = vec![0];
        combos(1, n, n / 2 - 1, &mut cur, &mut out);
    } else {
        combos(0, n, n / 2, &mut Vec::new(), &mut out);
    }
    out
}

/// Total weight of edges whose endpoints carry different labels.
pub fn cut_weight(graph: &QubitGraph, labels: &[usize]) -> f64 {
    graph
        .edges()
        .filter(|&(i, j, _)| labels[i] != labels[j])
        .map(|(_, _, w)| w)
        .sum()
}

/// Split `nodes` (in that order) into `parts` groups with sizes differing by
/// at most one. Recursive bisection when `parts` is a power of two, otherwise
/// repeated peel-off of one part at a time. Returns one label per entry of
/// `nodes`.
pub(crate) fn k_way_labels(graph: &QubitGraph, nodes: &[usize], parts: usize, p: usize) -> Vec<usize> {
    let n = nodes.len();
    if parts <= 1 {
        return vec![0; n];
    }
    let size = n.div_ceil(parts);
    let padded = size * parts;
    let dense = Dense::from_graph(graph, nodes, padded);
    let mut labels = vec![0; padded];
    let all: Vec<usize> = (0..padded).collect();
    if parts.is_power_of_two() {
        bisect_recursive(&dense, n, &all, parts, 0, p, &mut labels);
    } else {
        let dummies = padded - n;
        let mut rest = all;
        for part in 0..parts - 1 {
            let with_dummy = part >= parts - dummies;
            let (a, b) = split_once(&dense, n, &rest, size, usize::from(with_dummy), p);
            for &v in &a {
                labels[v] = part;
            }
            rest = b;
        }
        for &v in &rest {
            labels[v] = parts - 1;
        }
    }
    labels.truncate(n);
    labels
}

fn bisect_recursive(
    dense: &Dense,
    real: usize,
    set: &[usize],
    parts: usize,
    first: usize,
    p: usize,
    labels: &mut [usize],
) {
    if parts == 1 {
        for &v in set {
            labels[v] = first;
        }
        return;
    }
    let dummies = set.iter().filter(|&&v| v >= real).count();
    let (a, b) = split_once(dense, real, set, set.len() / 2, dummies.div_ceil(2), p);
    bisect_recursive(dense, real, &a, parts / 2, first, p, labels);
    bisect_recursive(dense, real, &b, parts / 2, first + parts / 2, p, labels);
}

/// KL split of `set` into A of `a_size` (holding `a_dummies` pinned dummies)
/// and B with the remainder.
fn split_once(
    dense: &Dense,
    real: usize,
    set: &[usize],
    a_size: usize,
    a_dummies: usize,
    p: usize,
) -> (Vec<usize>, Vec<usize>) {
    let reals: Vec<usize> = set.iter().copied().filter(|&v| v < real).collect();
    let dummies: Vec<usize> = set.iter().copied().filter(|&v| v >= real).collect();
    let m = set.len();
    let mut sub_w = vec![0.0; m * m];
    for (i, &u) in set.iter().enumerate() {
        for (j, &v) in set.iter().enumerate() {
            sub_w[i * m + j] = dense.at(u, v);
        }
    }
    let sub = Dense { n: m, w: sub_w };
    let pos = |v: usize| set.iter().position(|&x| x == v).unwrap();
    let mut side = vec![true; m];
    let mut pinned = vec![false; m];
    let a_reals = a_size - a_dummies;
    for &v in &reals[..a_reals.min(reals.len())] {
        side[pos(v)] = false;
    }
    for (i, &v) in dummies.iter().enumerate() {
        let k = pos(v);
        pinned[k] = true;
        side[k] = i >= a_dummies;
    }
    refine(&sub, &mut side, &pinned, p);
    let a = (0..m).filter(|&i| !side[i]).map(|i| set[i]).collect();
    let b = (0..m).filter(|&i| side[i]).map(|i| set[i]).collect();
    (a, b)
}

/// Balanced `k`-way partition of all graph nodes. Dummy padding is stripped,
/// so part sizes differ by at most one; parts can be empty when `k > n`.
pub fn partition_k_way(graph: &QubitGraph, k: usize, p: usize) -> Result<Vec<Vec<usize>>, PartitionError> {
    if k == 0 {
        return Err(PartitionError::Config("k must be positive".into()));
    }
    let nodes: Vec<usize> = (0..graph.node_count()).collect();
    let labels = k_way_labels(graph, &nodes, k, p);
    let mut parts = vec![Vec::new(); k];
    for (v, &l) in labels.iter().enumerate() {
        parts[l].push(v);
    }
    Ok(parts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize, edges: &[(usize, usize, f64)]) -> QubitGraph {
        QubitGraph::from_edges(n, edges.iter().copied()).unwrap()
    }

    #[test]
    fn four_node_example() {
        let g = graph(4, &[(0, 1, 5.0), (2, 3, 5.0), (1, 2, 1.0)]);
        let r = kl_bipartition(&g, 10, Some(&[0, 2])).unwrap();
        let mut sides = [r.a.clone(), r.b.clone()];
        sides.sort();
        assert_eq!(sides, [vec![0, 1], vec![2, 3]]);
        assert_eq!(r.cut, 1.0);
        assert_eq!(r.pass_cuts.first(), Some(&11.0));
    }

    #[test]
    fn trivial_cases() {
        let empty = graph(6, &[]);
        let r = kl_bipartition(&empty, 5, None).unwrap();
        assert_eq!((r.a.len(), r.b.len(), r.cut), (3, 3, 0.0));
        let pair = graph(2, &[(0, 1, 2.5)]);
        let r = kl_bipartition(&pair, 5, None).unwrap();
        assert_eq!((r.a, r.b, r.cut), (vec![0], vec![1], 2.5));
    }

    #[test]
    fn odd_counts_are_padded() {
        let g = graph(5, &[(0, 4, 3.0), (1, 2, 3.0), (2, 3, 1.0)]);
        let r = kl_bipartition(&g, 10, None).unwrap();
        assert!(r.a.len().abs_diff(r.b.len()) <= 1);
        assert_eq!(r.a.len() + r.b.len(), 5);
        // {0, 4} | {1, 2, 3} separates nothing.
        assert_eq!(r.cut, 0.0);
    }

    #[test]
    fn seed_validation() {
        let g = graph(4, &[]);
        assert!(kl_bipartition(&g, 1, Some(&[0])).is_err());
        assert!(kl_bipartition(&g, 1, Some(&[0, 0])).is_err());
        assert!(kl_bipartition(&g, 1, Some(&[0, 9])).is_err());
    }

    #[test]
    fn seed_split_counts() {
        assert_eq!(balanced_seed_splits(4).len(), 3);
        assert_eq!(balanced_seed_splits(8).len(), 35);
        assert_eq!(balanced_seed_splits(5).len(), 10);
        assert_eq!(balanced_seed_splits(1), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn four_heavy_pairs() {
        let g = graph(
            8,
            &[
                (0, 5, 9.0),
                (1, 6, 9.0),
                (2, 7, 9.0),
                (3, 4, 9.0),
                (0, 1, 0.5),
                (2, 3, 0.5),
            ],
        );
        let parts = partition_k_way(&g, 4, 10).unwrap();
        let mut sorted: Vec<Vec<usize>> = parts.clone();
        sorted.sort();
        assert_eq!(sorted, vec![vec![0, 5], vec![1, 6], vec![2, 7], vec![3, 4]]);
        let mut labels = vec![0; 8];
        for (l, p) in parts.iter().enumerate() {
            for &v in p {
                labels[v] = l;
            }
        }
        assert_eq!(cut_weight(&g, &labels), 1.0);
    }

    #[test]
    fn k_equals_n_gives_singletons() {
        let g = graph(5, &[(0, 1, 1.0), (3, 4, 2.0)]);
        let parts = partition_k_way(&g, 5, 4).unwrap();
        assert!(parts.iter().all(|p| p.len() == 1));
    }

    #[test]
    fn k_way_balance_with_padding() {
        let edges: Vec<(usize, usize, f64)> = (0..29).map(|i| (i, i + 1, 1.0 + i as f64)).collect();
        let g = graph(30, &edges);
        for k in [2, 3, 4, 5, 7, 8] {
            let parts = partition_k_way(&g, k, 6).unwrap();
            let sizes: Vec<usize> = parts.iter().map(Vec::len).collect();
            let (lo, hi) = (sizes.iter().min().unwrap(), sizes.iter().max().unwrap());
            assert!(hi - lo <= 1, "k={k} sizes {sizes:?}");
            assert_eq!(sizes.iter().sum::<usize>(), 30);
        }
    }

    #[test]
    fn k_two_matches_bipartition() {
        let g = graph(6, &[(0, 3, 4.0), (1, 4, 4.0), (2, 5, 4.0), (0, 1, 1.0)]);
        let r = kl_bipartition(&g, 10, None).unwrap();
        let parts = partition_k_way(&g, 2, 10).unwrap();
        assert_eq!(parts, vec![r.a, r.b]);
    }
}
