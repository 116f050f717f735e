//! Partitioned graphs, V-admissibility and the signed edge count kappa.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::correlation::bowen_distance;
use crate::error::{invalid, Error, Result};
use crate::space::{MetricSpace, Trajectory};

/// Largest vertex count accepted by the exhaustive search.
pub const BRUTE_FORCE_MAX_N: usize = 8;

/// A simple undirected graph on `0..n` with a partition of its vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartitionedGraph {
    n: usize,
    parts: Vec<Vec<usize>>,
    part_of: Vec<usize>,
    edges: BTreeSet<(usize, usize)>,
}

impl PartitionedGraph {
    pub fn new(
        n: usize,
        parts: Vec<Vec<usize>>,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        if parts.len() < 2 {
            return Err(invalid("a partition needs at least two parts"));
        }
        let mut part_of = vec![usize::MAX; n];
        for (a, part) in parts.iter().enumerate() {
            if part.is_empty() {
                return Err(invalid(format!("part {a} is empty")));
            }
            for &v in part {
                if v >= n {
                    return Err(invalid(format!("vertex {v} out of range 0..{n}")));
                }
                if part_of[v] != usize::MAX {
                    return Err(invalid(format!("vertex {v} lies in two parts")));
                }
                part_of[v] = a;
            }
        }
        if let Some(v) = part_of.iter().position(|&a| a == usize::MAX) {
            return Err(invalid(format!("vertex {v} is in no part")));
        }
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u == v {
                return Err(invalid(format!("self-loop at {u}")));
            }
            if u >= n || v >= n {
                return Err(invalid(format!("edge ({u}, {v}) out of range")));
            }
            set.insert((u.min(v), u.max(v)));
        }
        Ok(Self {
            n,
            parts,
            part_of,
            edges: set,
        })
    }

    /// Consecutive parts `0..s_0`, `s_0..s_0+s_1`, ...
    pub fn with_part_sizes(
        sizes: &[usize],
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let n = sizes.iter().sum();
        Self::new(n, consecutive_parts(sizes), edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn parts(&self) -> &[Vec<usize>] {
        &self.parts
    }

    pub fn part_of(&self, v: usize) -> usize {
        self.part_of[v]
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    /// `m_ab(G)`, the number of edges between parts `a` and `b` (inside `a`
    /// when `a == b`).
    pub fn part_edges(&self, a: usize, b: usize) -> usize {
        self.edges
            .iter()
            .filter(|&&(u, v)| {
                let (pu, pv) = (self.part_of[u], self.part_of[v]);
                (pu == a && pv == b) || (pu == b && pv == a)
            })
            .count()
    }

    fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        adj
    }
}

fn consecutive_parts(sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut start = 0;
    sizes
        .iter()
        .map(|&s| {
            let part = (start..start + s).collect();
            start += s;
            part
        })
        .collect()
}

/// Whenever `{i, j}` and `{i', j}` are edges with `i, i'` in one part and `j`
/// in another, `{i, i'}` is an edge too.
pub fn is_v_admissible(g: &PartitionedGraph) -> bool {
    let adj = g.neighbors();
    for (j, nbrs) in adj.iter().enumerate() {
        for (x, &i) in nbrs.iter().enumerate() {
            if g.part_of(i) == g.part_of(j) {
                continue;
            }
            for &i2 in &nbrs[x + 1..] {
                if g.part_of(i2) == g.part_of(i) && !g.has_edge(i, i2) {
                    return false;
                }
            }
        }
    }
    true
}

/// `sum_{a<b} m_ab(G) - sum_a m_aa(G)`.
pub fn kappa(g: &PartitionedGraph) -> i64 {
    g.edges()
        .map(|(u, v)| if g.part_of(u) == g.part_of(v) { -1 } else { 1 })
        .sum()
}

/// `sum_{a<b} min(|V_a|, |V_b|)`.
pub fn max_kappa_formula(part_sizes: &[usize]) -> Result<i64> {
    check_sizes(part_sizes)?;
    let mut total = 0;
    for (a, &sa) in part_sizes.iter().enumerate() {
        for &sb in &part_sizes[a + 1..] {
            total += sa.min(sb) as i64;
        }
    }
    Ok(total)
}

fn check_sizes(part_sizes: &[usize]) -> Result<()> {
    if part_sizes.len() < 2 {
        return Err(invalid("need at least two parts"));
    }
    if part_sizes.contains(&0) {
        return Err(invalid("part sizes must be positive"));
    }
    Ok(())
}

/// `floor(n (k - 1) / 2)`.
pub fn kappa_upper_bound(part_sizes: &[usize]) -> i64 {
    let n: usize = part_sizes.iter().sum();
    (n * (part_sizes.len() - 1) / 2) as i64
}

/// Bitmask state of an edge subset, updated one edge at a time.
struct MaskGraph<'a> {
    adj: Vec<u32>,
    part_of: &'a [usize],
    part_mask: &'a [u32],
    kappa: i64,
}

impl MaskGraph<'_> {
    fn toggle(&mut self, (u, v): (usize, usize)) {
        let sign = if self.part_of[u] == self.part_of[v] {
            -1
        } else {
            1
        };
        if self.adj[u] >> v & 1 == 1 {
            self.kappa -= sign;
        } else {
            self.kappa += sign;
        }
        self.adj[u] ^= 1 << v;
        self.adj[v] ^= 1 << u;
    }

    fn admissible(&self) -> bool {
        for (j, &nbrs) in self.adj.iter().enumerate() {
            for (a, &mask) in self.part_mask.iter().enumerate() {
                if a == self.part_of[j] {
                    continue;
                }
                let s = nbrs & mask;
                let mut rest = s;
                while rest != 0 {
                    let i = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    if s & !(self.adj[i] | 1 << i) != 0 {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// Maximum of `kappa` over every V-admissible graph on consecutive parts of
/// the given sizes, by exhaustive enumeration of edge subsets.
pub fn max_kappa_bruteforce(part_sizes: &[usize]) -> Result<i64> {
    check_sizes(part_sizes)?;
    let n: usize = part_sizes.iter().sum();
    if n > BRUTE_FORCE_MAX_N {
        return Err(Error::TooLarge {
            n,
            max: BRUTE_FORCE_MAX_N,
        });
    }
    let parts = consecutive_parts(part_sizes);
    let mut part_of = vec![0; n];
    let mut part_mask = vec![0u32; parts.len()];
    for (a, part) in parts.iter().enumerate() {
        for &v in part {
            part_of[v] = a;
            part_mask[a] |= 1 << v;
        }
    }
    let all_edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect();
    let e = all_edges.len();
    // split on the top bits of the Gray code; each chunk walks its own range
    let chunk_bits = e.min(6);
    let chunk_len = 1u64 << (e - chunk_bits);
    let best = (0..1u64 << chunk_bits)
        .into_par_iter()
        .map(|c| {
            let start = c * chunk_len;
            let mut g = MaskGraph {
                adj: vec![0; n],
                part_of: &part_of,
                part_mask: &part_mask,
                kappa: 0,
            };
            let gray = start ^ (start >> 1);
            for (b, &edge) in all_edges.iter().enumerate() {
                if gray >> b & 1 == 1 {
                    g.toggle(edge);
                }
            }
            let mut best = if g.admissible() { g.kappa } else { i64::MIN };
            for t in start + 1..start + chunk_len {
                g.toggle(all_edges[t.trailing_zeros() as usize]);
                if g.kappa > best && g.admissible() {
                    best = g.kappa;
                }
            }
            best
        })
        .max()
        .unwrap_or(0);
    Ok(best)
}

/// For each pair of parts, the matching `V_a[t] -- V_b[t]`,
/// `t < min(|V_a|, |V_b|)`; no edges inside parts.
pub fn optimal_witness_graph(part_sizes: &[usize]) -> Result<PartitionedGraph> {
    check_sizes(part_sizes)?;
    let parts = consecutive_parts(part_sizes);
    let mut edges = Vec::new();
    for a in 0..parts.len() {
        for b in a + 1..parts.len() {
            for (&u, &v) in parts[a].iter().zip(&parts[b]) {
                edges.push((u, v));
            }
        }
    }
    PartitionedGraph::with_part_sizes(part_sizes, edges)
}

/// Graph on the window starts `0..k n`, parted by residue mod `k`; `i ~ j` iff
/// their `k m`-step Bowen distance is at most `2 eps` (same residue) or
/// `eps` (different residues).
pub fn recurrence_graph<M: MetricSpace>(
    traj: &Trajectory<M>,
    k: usize,
    m: usize,
    n: usize,
    eps: f64,
) -> Result<PartitionedGraph> {
    if k < 2 {
        return Err(invalid("k must be at least 2"));
    }
    if m == 0 || n == 0 {
        return Err(invalid("m and n must be positive"));
    }
    if eps.is_nan() || eps < 0.0 {
        return Err(invalid(format!("radius must be nonnegative, got {eps}")));
    }
    let vertices = k * n;
    let needed = vertices + k * m - 1;
    if traj.len() < needed {
        return Err(Error::WindowExceedsTrajectory {
            needed: needed - 1,
            len: traj.len(),
        });
    }
    let parts: Vec<Vec<usize>> = (0..k).map(|a| (a..vertices).step_by(k).collect()).collect();
    let rows: Vec<Vec<(usize, usize)>> = (0..vertices)
        .into_par_iter()
        .map(|i| {
            (i + 1..vertices)
                .filter(|&j| {
                    let radius = if i % k == j % k { 2.0 * eps } else { eps };
                    bowen_distance(traj, i, j, k * m).expect("window checked") <= radius
                })
                .map(|j| (i, j))
                .collect()
        })
        .collect();
    PartitionedGraph::new(vertices, parts, rows.into_iter().flatten())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KappaCheck {
    pub sizes: Vec<usize>,
    pub n: usize,
    pub k: usize,
    pub formula: i64,
    pub brute_force: i64,
    pub witness: i64,
    pub bound: i64,
    pub passed: bool,
}

/// Integer partitions of `n` into exactly `k` positive parts, nonincreasing.
pub fn integer_partitions(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, k: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == 0 {
            if n == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for s in (1..=max.min(n)).rev() {
            if n - s < k - 1 {
                continue;
            }
            cur.push(s);
            go(n - s, k - 1, s, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, k, n, &mut Vec::new(), &mut out);
    out
}

/// Compares the exhaustive maximum, the closed form, the matching witness and
/// the `n (k - 1) / 2` bound on every partition with `2 <= n <= max_n` and
/// `2 <= k <= max_k`.
pub fn verify_kappa(max_n: usize, max_k: usize) -> Result<Vec<KappaCheck>> {
    if max_n > BRUTE_FORCE_MAX_N {
        return Err(Error::TooLarge {
            n: max_n,
            max: BRUTE_FORCE_MAX_N,
        });
    }
    let mut out = Vec::new();
    for n in 2..=max_n {
        for k in 2..=max_k.min(n) {
            for sizes in integer_partitions(n, k) {
                let formula = max_kappa_formula(&sizes)?;
                let brute_force = max_kappa_bruteforce(&sizes)?;
                let w = optimal_witness_graph(&sizes)?;
                let witness = if is_v_admissible(&w) {
                    kappa(&w)
                } else {
                    i64::MIN
                };
                let bound = kappa_upper_bound(&sizes);
                out.push(KappaCheck {
                    passed: formula == brute_force && witness == formula && formula <= bound,
                    sizes,
                    n,
                    k,
                    formula,
                    brute_force,
                    witness,
                    bound,
                });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::{BernoulliSpec, SymbolSequence};

    #[test]
    fn admissibility_examples() {
        let parts = vec![vec![0, 1], vec![2]];
        let g = PartitionedGraph::new(3, parts.clone(), []).unwrap();
        assert!(is_v_admissible(&g));
        assert_eq!(kappa(&g), 0);
        let g = PartitionedGraph::new(3, parts.clone(), [(0, 2), (1, 2)]).unwrap();
        assert!(!is_v_admissible(&g));
        let g = PartitionedGraph::new(3, parts.clone(), [(0, 2), (1, 2), (0, 1)]).unwrap();
        assert!(is_v_admissible(&g));
        assert_eq!(kappa(&g), 1);
        assert_eq!((g.part_edges(0, 1), g.part_edges(0, 0)), (2, 1));
        let g = PartitionedGraph::new(3, parts, [(0, 2)]).unwrap();
        assert_eq!(kappa(&g), 1);
    }

    #[test]
    fn kappa_can_be_negative() {
        let g = PartitionedGraph::with_part_sizes(&[3, 1], [(0, 1), (0, 2), (1, 2)]).unwrap();
        assert_eq!(kappa(&g), -3);
    }

    #[test]
    fn invalid_graphs_rejected() {
        assert!(PartitionedGraph::new(2, vec![vec![0, 1]], []).is_err());
        assert!(PartitionedGraph::new(3, vec![vec![0], vec![1]], []).is_err());
        assert!(PartitionedGraph::new(2, vec![vec![0], vec![0, 1]], []).is_err());
        assert!(PartitionedGraph::new(2, vec![vec![0], vec![1]], [(1, 1)]).is_err());
        assert!(PartitionedGraph::new(2, vec![vec![0], vec![1]], [(0, 2)]).is_err());
        assert!(PartitionedGraph::new(2, vec![vec![0], vec![], vec![1]], []).is_err());
    }

    #[test]
    fn formula_examples() {
        assert_eq!(max_kappa_formula(&[2, 2]).unwrap(), 2);
        assert_eq!(max_kappa_formula(&[1, 2, 3]).unwrap(), 4);
        assert_eq!(max_kappa_formula(&[1, 1]).unwrap(), 1);
        assert!(max_kappa_formula(&[3]).is_err());
    }

    #[test]
    fn brute_force_examples() {
        assert_eq!(max_kappa_bruteforce(&[2, 2]).unwrap(), 2);
        assert_eq!(max_kappa_bruteforce(&[3, 3]).unwrap(), 3);
        assert_eq!(kappa_upper_bound(&[3, 3]), 3);
        assert_eq!(max_kappa_bruteforce(&[1, 1]).unwrap(), 1);
        assert!(matches!(
            max_kappa_bruteforce(&[5, 4]),
            Err(Error::TooLarge { n: 9, max: 8 })
        ));
    }

    #[test]
    fn brute_force_matches_naive_scan() {
        // independent check of the Gray-code walk: scan subsets in binary order
        let sizes = [2, 1, 2];
        let all: Vec<(usize, usize)> = (0..5)
            .flat_map(|u| (u + 1..5).map(move |v| (u, v)))
            .collect();
        let mut best = i64::MIN;
        for mask in 0u32..1 << all.len() {
            let edges = all
                .iter()
                .enumerate()
                .filter(|(b, _)| mask >> b & 1 == 1)
                .map(|(_, &e)| e);
            let g = PartitionedGraph::with_part_sizes(&sizes, edges).unwrap();
            if is_v_admissible(&g) {
                best = best.max(kappa(&g));
            }
        }
        assert_eq!(best, max_kappa_bruteforce(&sizes).unwrap());
    }

    #[test]
    fn partitions_enumerated() {
        assert_eq!(integer_partitions(5, 2), vec![vec![4, 1], vec![3, 2]]);
        assert_eq!(integer_partitions(6, 3).len(), 3);
        assert!(integer_partitions(2, 3).is_empty());
    }

    #[test]
    fn kappa_checks_two_parts() {
        let checks = verify_kappa(8, 2).unwrap();
        assert!(checks.iter().all(|c| c.passed), "{checks:?}");
        assert!(verify_kappa(9, 2).is_err());
    }

    fn complete(sizes: &[usize]) -> PartitionedGraph {
        let n: usize = sizes.iter().sum();
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
        PartitionedGraph::with_part_sizes(sizes, edges).unwrap()
    }

    #[test]
    fn three_parts_exceed_matching_value() {
        // the complete graph is admissible with kappa = sum n_a n_b - sum C(n_a, 2)
        let g = complete(&[1, 2, 3]);
        assert!(is_v_admissible(&g));
        assert_eq!(kappa(&g), 11 - 4);
        assert_eq!(max_kappa_bruteforce(&[1, 2, 3]).unwrap(), 7);
        assert_eq!(max_kappa_formula(&[1, 2, 3]).unwrap(), 4);
        assert_eq!(kappa_upper_bound(&[1, 2, 3]), 6);

        let g = complete(&[2, 2, 2]);
        assert_eq!(kappa(&g), 9);
        assert_eq!(max_kappa_bruteforce(&[2, 2, 2]).unwrap(), 9);
        assert_eq!(max_kappa_bruteforce(&[2, 1, 1]).unwrap(), 4);
        assert_eq!(max_kappa_bruteforce(&[1, 1, 1]).unwrap(), 3);

        let checks = verify_kappa(6, 4).unwrap();
        assert!(checks.iter().filter(|c| c.k == 2).all(|c| c.passed));
        assert!(checks.iter().any(|c| !c.passed));
        assert!(checks
            .iter()
            .all(|c| c.witness == c.formula && c.brute_force >= c.formula));
    }

    #[test]
    fn witness_graph_matches_formula() {
        for sizes in [vec![1, 2, 3], vec![4, 4], vec![2, 3, 1, 5]] {
            let g = optimal_witness_graph(&sizes).unwrap();
            assert!(is_v_admissible(&g));
            assert_eq!(kappa(&g), max_kappa_formula(&sizes).unwrap());
        }
    }

    fn binary_traj(len: usize, seed: u64) -> Trajectory<crate::space::ShiftSpace> {
        SymbolSequence::bernoulli(&BernoulliSpec::uniform(2, seed).unwrap())
            .shift_trajectory(len, 32)
            .unwrap()
    }

    #[test]
    fn recurrence_graph_admissible() {
        let traj = binary_traj(64, 7);
        let g = recurrence_graph(&traj, 2, 2, 20, 0.5).unwrap();
        assert_eq!(g.n(), 40);
        assert!(is_v_admissible(&g));
        for seed in 0..10 {
            let traj = binary_traj(80, seed);
            for (k, eps) in [(2, 0.25), (3, 0.125), (4, 0.5)] {
                let g = recurrence_graph(&traj, k, 2, 10, eps).unwrap();
                assert!(is_v_admissible(&g));
            }
        }
    }

    #[test]
    fn recurrence_graph_extremes() {
        let constant = SymbolSequence::constant(0, 2)
            .unwrap()
            .shift_trajectory(40, 16)
            .unwrap();
        let g = recurrence_graph(&constant, 2, 2, 10, 0.0).unwrap();
        assert_eq!(g.edge_count(), 20 * 19 / 2);
        assert!(is_v_admissible(&g));
        let traj = binary_traj(200, 3);
        let g = recurrence_graph(&traj, 2, 60, 10, 0.0).unwrap();
        assert_eq!(g.edge_count(), 0);
        assert!(recurrence_graph(&traj, 2, 100, 10, 0.1).is_err());
    }
}
