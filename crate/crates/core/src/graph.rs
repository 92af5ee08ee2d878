//! Graph data model: bipartite input graphs, weighted unipartite graphs and
//! a compact unweighted adjacency used by the topology metrics.
//!
//! Node identifiers are opaque strings. Internally every node is a dense
//! `u32` index; indices follow the lexicographic order of the identifiers,
//! so two graphs built from the same identifiers agree on their indexing
//! regardless of input row order.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One of the two node classes of a bipartite graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
        }
    }
}

impl std::str::FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Side> {
        match s.to_ascii_lowercase().as_str() {
            "left" => Ok(Side::Left),
            "right" => Ok(Side::Right),
            other => Err(Error::InvalidParameter(format!("unknown side `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BipartiteEdge {
    pub left: u32,
    pub right: u32,
    pub multiplicity: u32,
}

/// Two disjoint node sets with edges only across them.
///
/// Every node has at least one edge. Multiplicity records how often a pair
/// was observed; projections only look at the neighbour sets.
#[derive(Clone, Debug, PartialEq)]
pub struct BipartiteGraph {
    left_ids: Vec<String>,
    right_ids: Vec<String>,
    edges: Vec<BipartiteEdge>,
    left_adj: Vec<Vec<u32>>,
    right_adj: Vec<Vec<u32>>,
}

impl BipartiteGraph {
    /// Build from identifier pairs; repeated pairs accumulate multiplicity.
    pub fn from_pairs<I, L, R>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (L, R, u32)>,
        L: Into<String>,
        R: Into<String>,
    {
        let mut counts: BTreeMap<(String, String), u32> = BTreeMap::new();
        for (l, r, m) in pairs {
            *counts.entry((l.into(), r.into())).or_insert(0) += m;
        }
        let left: BTreeSet<&str> = counts.keys().map(|(l, _)| l.as_str()).collect();
        let right: BTreeSet<&str> = counts.keys().map(|(_, r)| r.as_str()).collect();
        if let Some(shared) = left.intersection(&right).next() {
            return Err(Error::SideCollision(shared.to_string()));
        }
        let left_ids: Vec<String> = left.into_iter().map(String::from).collect();
        let right_ids: Vec<String> = right.into_iter().map(String::from).collect();
        let left_index: BTreeMap<&str, u32> =
            left_ids.iter().enumerate().map(|(i, s)| (s.as_str(), i as u32)).collect();
        let right_index: BTreeMap<&str, u32> =
            right_ids.iter().enumerate().map(|(i, s)| (s.as_str(), i as u32)).collect();
        let edges = counts
            .iter()
            .filter(|(_, &m)| m > 0)
            .map(|((l, r), &m)| BipartiteEdge {
                left: left_index[l.as_str()],
                right: right_index[r.as_str()],
                multiplicity: m,
            })
            .collect();
        Self::from_indexed(left_ids, right_ids, edges)
    }

    /// Build from already-indexed parts. Identifier lists must be sorted and
    /// unique, and every node must be touched by at least one edge.
    pub fn from_indexed(
        left_ids: Vec<String>,
        right_ids: Vec<String>,
        mut edges: Vec<BipartiteEdge>,
    ) -> Result<Self> {
        if edges.is_empty() {
            return Err(Error::EmptyGraph);
        }
        for ids in [&left_ids, &right_ids] {
            if ids.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidParameter(
                    "node identifiers must be sorted and unique".into(),
                ));
            }
        }
        edges.sort_unstable();
        if edges.windows(2).any(|w| (w[0].left, w[0].right) == (w[1].left, w[1].right)) {
            return Err(Error::InvalidParameter("duplicate bipartite edge".into()));
        }
        let mut left_adj = vec![Vec::new(); left_ids.len()];
        let mut right_adj = vec![Vec::new(); right_ids.len()];
        for e in &edges {
            if e.left as usize >= left_ids.len() || e.right as usize >= right_ids.len() {
                return Err(Error::InvalidEdge {
                    a: e.left as usize,
                    b: e.right as usize,
                    reason: "endpoint out of range",
                });
            }
            if e.multiplicity == 0 {
                return Err(Error::InvalidEdge {
                    a: e.left as usize,
                    b: e.right as usize,
                    reason: "zero multiplicity",
                });
            }
            left_adj[e.left as usize].push(e.right);
            right_adj[e.right as usize].push(e.left);
        }
        if left_adj.iter().chain(&right_adj).any(Vec::is_empty) {
            return Err(Error::InvalidParameter("bipartite graph has an isolated node".into()));
        }
        // edges are sorted by (left, right), so left lists are sorted already
        for list in &mut right_adj {
            list.sort_unstable();
        }
        Ok(Self { left_ids, right_ids, edges, left_adj, right_adj })
    }

    pub fn node_count(&self, side: Side) -> usize {
        self.ids(side).len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn ids(&self, side: Side) -> &[String] {
        match side {
            Side::Left => &self.left_ids,
            Side::Right => &self.right_ids,
        }
    }

    pub fn edges(&self) -> &[BipartiteEdge] {
        &self.edges
    }

    /// Sorted neighbour indices (on the opposite side) of node `i`.
    pub fn neighbors(&self, side: Side, i: usize) -> &[u32] {
        match side {
            Side::Left => &self.left_adj[i],
            Side::Right => &self.right_adj[i],
        }
    }

    pub fn degree(&self, side: Side, i: usize) -> usize {
        self.neighbors(side, i).len()
    }

    pub fn degrees(&self, side: Side) -> Vec<usize> {
        (0..self.node_count(side)).map(|i| self.degree(side, i)).collect()
    }

    pub fn multiplicity(&self, left: u32, right: u32) -> Option<u32> {
        self.edges
            .binary_search_by(|e| (e.left, e.right).cmp(&(left, right)))
            .ok()
            .map(|i| self.edges[i].multiplicity)
    }

    pub fn total_multiplicity(&self) -> u64 {
        self.edges.iter().map(|e| e.multiplicity as u64).sum()
    }

    pub fn index_of(&self, side: Side, id: &str) -> Option<u32> {
        self.ids(side).binary_search_by(|s| s.as_str().cmp(id)).ok().map(|i| i as u32)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightedEdge {
    pub a: u32,
    pub b: u32,
    pub weight: f64,
}

/// Undirected graph with strictly positive edge weights.
///
/// Edges are stored once with `a < b`, sorted. Isolated nodes are allowed;
/// backbones keep every node of the graph they were extracted from.
#[derive(Clone, Debug)]
pub struct WeightedGraph {
    labels: Arc<[String]>,
    edges: Vec<WeightedEdge>,
}

impl WeightedGraph {
    pub fn new(labels: Arc<[String]>, edges: Vec<WeightedEdge>) -> Result<Self> {
        let n = labels.len();
        let mut edges: Vec<WeightedEdge> = edges
            .into_iter()
            .map(|e| if e.a > e.b { WeightedEdge { a: e.b, b: e.a, weight: e.weight } } else { e })
            .collect();
        for e in &edges {
            let (a, b) = (e.a as usize, e.b as usize);
            if a == b {
                return Err(Error::InvalidEdge { a, b, reason: "self-loop" });
            }
            if b >= n {
                return Err(Error::InvalidEdge { a, b, reason: "endpoint out of range" });
            }
            if !(e.weight > 0.0 && e.weight.is_finite()) {
                return Err(Error::InvalidEdge { a, b, reason: "weight must be positive and finite" });
            }
        }
        edges.sort_unstable_by_key(|e| (e.a, e.b));
        if let Some(w) = edges.windows(2).find(|w| (w[0].a, w[0].b) == (w[1].a, w[1].b)) {
            return Err(Error::InvalidEdge {
                a: w[0].a as usize,
                b: w[0].b as usize,
                reason: "duplicate edge",
            });
        }
        Ok(Self { labels, edges })
    }

    /// Internal constructor for edge lists already known to be canonical.
    pub(crate) fn from_sorted_unchecked(labels: Arc<[String]>, edges: Vec<WeightedEdge>) -> Self {
        debug_assert!(edges.windows(2).all(|w| (w[0].a, w[0].b) < (w[1].a, w[1].b)));
        debug_assert!(edges.iter().all(|e| e.a < e.b && e.weight > 0.0));
        Self { labels, edges }
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn labels(&self) -> &Arc<[String]> {
        &self.labels
    }

    pub fn edges(&self) -> &[WeightedEdge] {
        &self.edges
    }

    pub fn weight(&self, a: u32, b: u32) -> Option<f64> {
        let key = if a < b { (a, b) } else { (b, a) };
        self.edges
            .binary_search_by(|e| (e.a, e.b).cmp(&key))
            .ok()
            .map(|i| self.edges[i].weight)
    }

    pub fn strengths(&self) -> Vec<f64> {
        let mut s = vec![0.0; self.node_count()];
        for e in &self.edges {
            s[e.a as usize] += e.weight;
            s[e.b as usize] += e.weight;
        }
        s
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.node_count()];
        for e in &self.edges {
            d[e.a as usize] += 1;
            d[e.b as usize] += 1;
        }
        d
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.weight).sum()
    }

    /// Same nodes, only the edges for which `keep` returns true.
    pub fn filter_edges(&self, mut keep: impl FnMut(usize, &WeightedEdge) -> bool) -> WeightedGraph {
        let edges = self.edges.iter().enumerate().filter(|(i, e)| keep(*i, e)).map(|(_, e)| *e).collect();
        Self::from_sorted_unchecked(self.labels.clone(), edges)
    }

    /// Two graphs share a node universe when their label lists agree.
    pub fn same_universe(&self, other: &WeightedGraph) -> bool {
        Arc::ptr_eq(&self.labels, &other.labels) || self.labels == other.labels
    }

    pub fn adjacency(&self) -> Adjacency {
        Adjacency::from_edges(self.node_count(), self.edges.iter().map(|e| (e.a, e.b)))
    }
}

/// Unweighted undirected adjacency in compressed sparse row form with
/// sorted neighbour lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Adjacency {
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

impl Adjacency {
    /// `pairs` must not contain self-loops or repeated pairs.
    pub fn from_edges(n: usize, pairs: impl IntoIterator<Item = (u32, u32)> + Clone) -> Self {
        let mut degree = vec![0usize; n];
        for (a, b) in pairs.clone() {
            debug_assert_ne!(a, b);
            degree[a as usize] += 1;
            degree[b as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..n].to_vec();
        let mut targets = vec![0u32; offsets[n]];
        for (a, b) in pairs {
            targets[fill[a as usize]] = b;
            fill[a as usize] += 1;
            targets[fill[b as usize]] = a;
            fill[b as usize] += 1;
        }
        for v in 0..n {
            targets[offsets[v]..offsets[v + 1]].sort_unstable();
        }
        Self { offsets, targets }
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.node_count()).map(|v| self.degree(v)).collect()
    }
}

/// Labels `0..n` rendered as strings, for graphs built programmatically.
pub fn numeric_labels(n: usize) -> Arc<[String]> {
    let width = n.saturating_sub(1).to_string().len();
    (0..n).map(|i| format!("{i:0width$}")).collect::<Vec<_>>().into()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicate_pairs_accumulate() {
        let g = BipartiteGraph::from_pairs([("u1", "d1", 1), ("u1", "d1", 1), ("u1", "d2", 1)]).unwrap();
        assert_eq!(g.node_count(Side::Left), 1);
        assert_eq!(g.node_count(Side::Right), 2);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.multiplicity(0, 0), Some(2));
        assert_eq!(g.multiplicity(0, 1), Some(1));
        assert_eq!(g.total_multiplicity(), 3);
    }

    #[test]
    fn sides_must_be_disjoint() {
        let err = BipartiteGraph::from_pairs([("a", "b", 1), ("b", "c", 1)]).unwrap_err();
        assert!(matches!(err, Error::SideCollision(ref s) if s == "b"));
    }

    #[test]
    fn empty_input_is_rejected() {
        let pairs: Vec<(String, String, u32)> = vec![];
        assert!(matches!(BipartiteGraph::from_pairs(pairs), Err(Error::EmptyGraph)));
    }

    #[test]
    fn indexing_is_lexicographic() {
        let g = BipartiteGraph::from_pairs([("zed", "x", 1), ("amy", "y", 1)]).unwrap();
        assert_eq!(g.ids(Side::Left), &["amy".to_string(), "zed".to_string()]);
        assert_eq!(g.index_of(Side::Right, "y"), Some(1));
        assert_eq!(g.neighbors(Side::Left, 0), &[1]);
    }

    #[test]
    fn weighted_graph_rejects_bad_edges() {
        let labels = numeric_labels(3);
        let self_loop = WeightedGraph::new(labels.clone(), vec![WeightedEdge { a: 1, b: 1, weight: 1.0 }]);
        assert!(self_loop.is_err());
        let zero = WeightedGraph::new(labels.clone(), vec![WeightedEdge { a: 0, b: 1, weight: 0.0 }]);
        assert!(zero.is_err());
        let dup = WeightedGraph::new(
            labels,
            vec![WeightedEdge { a: 0, b: 1, weight: 1.0 }, WeightedEdge { a: 1, b: 0, weight: 2.0 }],
        );
        assert!(dup.is_err());
    }

    #[test]
    fn weighted_graph_normalizes_orientation() {
        let g = WeightedGraph::new(numeric_labels(3), vec![WeightedEdge { a: 2, b: 0, weight: 1.5 }]).unwrap();
        assert_eq!(g.edges()[0], WeightedEdge { a: 0, b: 2, weight: 1.5 });
        assert_eq!(g.weight(2, 0), Some(1.5));
        assert_eq!(g.strengths(), vec![1.5, 0.0, 1.5]);
    }

    #[test]
    fn adjacency_lists_are_sorted() {
        let adj = Adjacency::from_edges(4, [(0u32, 3u32), (0, 1), (2, 0)]);
        assert_eq!(adj.neighbors(0), &[1, 2, 3]);
        assert_eq!(adj.edge_count(), 3);
        assert_eq!(adj.degrees(), vec![3, 1, 1, 1]);
    }
}
