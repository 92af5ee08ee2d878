//! Multi-level greedy modularity maximization (Louvain-style local moves
//! followed by aggregation), deterministic for a given seed.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Adjacency;

/// Weighted undirected graph with optional self-loops, the working type of
/// the community search.
#[derive(Clone, Debug, PartialEq)]
pub struct CommunityGraph {
    neighbors: Vec<Vec<(u32, f64)>>,
    self_loops: Vec<f64>,
}

impl CommunityGraph {
    /// Non-positive weights are dropped; repeated pairs are summed.
    pub fn from_weighted_edges(n: usize, edges: impl IntoIterator<Item = (u32, u32, f64)>) -> Self {
        let mut neighbors = vec![Vec::new(); n];
        let mut self_loops = vec![0.0; n];
        for (a, b, w) in edges {
            if !(w > 0.0) {
                continue;
            }
            if a == b {
                self_loops[a as usize] += w;
            } else {
                neighbors[a as usize].push((b, w));
                neighbors[b as usize].push((a, w));
            }
        }
        for list in &mut neighbors {
            list.sort_by_key(|&(v, _)| v);
            list.dedup_by(|next, kept| {
                if next.0 == kept.0 {
                    kept.1 += next.1;
                    true
                } else {
                    false
                }
            });
        }
        Self { neighbors, self_loops }
    }

    pub fn from_adjacency(g: &Adjacency) -> Self {
        Self {
            neighbors: (0..g.node_count()).map(|v| g.neighbors(v).iter().map(|&u| (u, 1.0)).collect()).collect(),
            self_loops: vec![0.0; g.node_count()],
        }
    }

    pub fn node_count(&self) -> usize {
        self.neighbors.len()
    }

    fn degree(&self, v: usize) -> f64 {
        2.0 * self.self_loops[v] + self.neighbors[v].iter().map(|&(_, w)| w).sum::<f64>()
    }

    /// Twice the total edge weight.
    fn double_weight(&self) -> f64 {
        (0..self.node_count()).map(|v| self.degree(v)).sum()
    }
}

/// `Q = Σ_c (e_c - a_c²)` with `e_c` the share of edge weight inside `c`
/// and `a_c` the share of edge endpoints in `c`.
pub fn modularity(g: &CommunityGraph, partition: &[usize]) -> f64 {
    let m2 = g.double_weight();
    if m2 == 0.0 {
        return 0.0;
    }
    let k = partition.iter().copied().max().map_or(0, |c| c + 1);
    let mut inside = vec![0.0; k];
    let mut tot = vec![0.0; k];
    for v in 0..g.node_count() {
        let c = partition[v];
        tot[c] += g.degree(v);
        inside[c] += 2.0 * g.self_loops[v];
        for &(u, w) in &g.neighbors[v] {
            if partition[u as usize] == c {
                inside[c] += w;
            }
        }
    }
    inside.iter().zip(&tot).map(|(i, t)| i / m2 - (t / m2).powi(2)).sum()
}

/// Relabel communities `0..k` in order of first appearance.
fn renumber(labels: &[usize]) -> (Vec<usize>, usize) {
    let mut map: BTreeMap<usize, usize> = BTreeMap::new();
    let mut out = Vec::with_capacity(labels.len());
    for &c in labels {
        let next = map.len();
        out.push(*map.entry(c).or_insert(next));
    }
    (out, map.len())
}

const MAX_PASSES: usize = 1000;

/// Local-moving phase. Returns community labels and whether anything moved.
fn local_moves(g: &CommunityGraph, rng: &mut ChaCha8Rng) -> (Vec<usize>, bool) {
    let n = g.node_count();
    let m2 = g.double_weight();
    let mut comm: Vec<usize> = (0..n).collect();
    if m2 == 0.0 {
        return (comm, false);
    }
    let degree: Vec<f64> = (0..n).map(|v| g.degree(v)).collect();
    let mut tot = degree.clone();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut link = vec![0.0; n];
    let mut seen = vec![false; n];
    let mut candidates: Vec<usize> = Vec::new();
    let eps = 1e-12 * m2;
    let mut moved_any = false;

    for _ in 0..MAX_PASSES {
        let mut moves = 0;
        for &v in &order {
            let current = comm[v];
            for &(u, w) in &g.neighbors[v] {
                let c = comm[u as usize];
                if !seen[c] {
                    seen[c] = true;
                    candidates.push(c);
                }
                link[c] += w;
            }
            let kv = degree[v];
            tot[current] -= kv;
            let mut best = current;
            let mut best_gain = link[current] - tot[current] * kv / m2;
            for &c in &candidates {
                let gain = link[c] - tot[c] * kv / m2;
                if gain > best_gain + eps {
                    best = c;
                    best_gain = gain;
                }
            }
            tot[best] += kv;
            comm[v] = best;
            if best != current {
                moves += 1;
            }
            for &c in &candidates {
                link[c] = 0.0;
                seen[c] = false;
            }
            link[current] = 0.0;
            candidates.clear();
        }
        if moves == 0 {
            break;
        }
        moved_any = true;
    }
    (comm, moved_any)
}

fn aggregate(g: &CommunityGraph, comm: &[usize], k: usize) -> CommunityGraph {
    let mut self_loops = vec![0.0; k];
    let mut links: Vec<BTreeMap<u32, f64>> = vec![BTreeMap::new(); k];
    for v in 0..g.node_count() {
        let cv = comm[v];
        self_loops[cv] += g.self_loops[v];
        for &(u, w) in &g.neighbors[v] {
            let cu = comm[u as usize];
            if cu == cv {
                // each internal edge is seen from both ends
                self_loops[cv] += w / 2.0;
            } else {
                *links[cv].entry(cu as u32).or_insert(0.0) += w;
            }
        }
    }
    CommunityGraph { neighbors: links.into_iter().map(|m| m.into_iter().collect()).collect(), self_loops }
}

/// Community label per node, labels numbered by first appearance.
pub fn louvain(g: &CommunityGraph, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut membership: Vec<usize> = (0..g.node_count()).collect();
    let mut level = g.clone();
    loop {
        let (comm, moved) = local_moves(&level, &mut rng);
        if !moved {
            break;
        }
        let (comm, k) = renumber(&comm);
        for m in membership.iter_mut() {
            *m = comm[*m];
        }
        if k == level.node_count() {
            break;
        }
        level = aggregate(&level, &comm, k);
    }
    renumber(&membership).0
}

/// Best partition found and its modularity, never worse than putting every
/// node in one community.
pub fn best_partition(g: &CommunityGraph, seed: u64) -> (Vec<usize>, f64) {
    let partition = louvain(g, seed);
    let q = modularity(g, &partition);
    let single = vec![0; g.node_count()];
    let q_single = modularity(g, &single);
    if q_single > q {
        (single, q_single)
    } else {
        (partition, q)
    }
}

/// Modularity-maximizing partition of an unweighted graph.
pub fn modularity_partition(g: &Adjacency, seed: u64) -> Result<(Vec<usize>, f64)> {
    if g.edge_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    Ok(best_partition(&CommunityGraph::from_adjacency(g), seed))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn adj(n: usize, edges: &[(u32, u32)]) -> Adjacency {
        Adjacency::from_edges(n, edges.iter().copied())
    }

    fn two_triangles() -> Adjacency {
        adj(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
    }

    #[test]
    fn two_triangles_q_half() {
        let g = CommunityGraph::from_adjacency(&two_triangles());
        assert!((modularity(&g, &[0, 0, 0, 1, 1, 1]) - 0.5).abs() < 1e-15);
        let (partition, q) = modularity_partition(&two_triangles(), 1).unwrap();
        assert_eq!(partition, vec![0, 0, 0, 1, 1, 1]);
        assert!((q - 0.5).abs() < 1e-15);
    }

    #[test]
    fn complete_graph_single_community_is_zero() {
        let edges: Vec<_> = (0..5u32).flat_map(|a| (a + 1..5).map(move |b| (a, b))).collect();
        let g = CommunityGraph::from_adjacency(&adj(5, &edges));
        assert!(modularity(&g, &[0; 5]).abs() < 1e-15);
    }

    #[test]
    fn bridged_cliques_split() {
        let mut edges = Vec::new();
        for base in [0u32, 5] {
            for a in 0..5 {
                for b in a + 1..5 {
                    edges.push((base + a, base + b));
                }
            }
        }
        edges.push((4, 5));
        let g = adj(10, &edges);
        for seed in 0..5 {
            let (p, q) = modularity_partition(&g, seed).unwrap();
            assert_eq!(p, vec![0, 0, 0, 0, 0, 1, 1, 1, 1, 1]);
            assert!(q > 0.4);
        }
    }

    #[test]
    fn aggregation_preserves_modularity() {
        let g = CommunityGraph::from_adjacency(&two_triangles());
        let comm = vec![0, 0, 1, 2, 2, 2];
        let agg = aggregate(&g, &comm, 3);
        assert!((modularity(&g, &comm) - modularity(&agg, &[0, 1, 2])).abs() < 1e-15);
        assert!((agg.double_weight() - g.double_weight()).abs() < 1e-15);
    }

    #[test]
    fn weighted_blocks() {
        let mut edges = Vec::new();
        for a in 0..6u32 {
            for b in a + 1..6 {
                let same = (a < 3) == (b < 3);
                edges.push((a, b, if same { 1.0 } else { 0.1 }));
            }
        }
        let g = CommunityGraph::from_weighted_edges(6, edges);
        let (p, q) = best_partition(&g, 3);
        assert_eq!(p, vec![0, 0, 0, 1, 1, 1]);
        assert!(q > 0.0);
    }

    #[test]
    fn no_edges_is_an_error() {
        assert!(modularity_partition(&adj(3, &[]), 0).is_err());
    }
}
