//! Topology measurements on backbones and pairwise graph similarity.
//!
//! Backbones are measured as unweighted graphs.

pub mod centrality;
pub mod community;
pub mod similarity;
pub mod topology;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::graph::{Adjacency, WeightedGraph};

pub use centrality::{betweenness, centralization, normalized_betweenness};
pub use community::{modularity, modularity_partition, CommunityGraph};
pub use similarity::{cc_distance, cc_similarity, degree_correlation, neighbor_jaccard};
pub use topology::{coverage, transitivity};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TopologyReport {
    pub node_count: usize,
    pub edge_count: usize,
    pub coverage: f64,
    pub transitivity: f64,
    /// Zero for a graph without edges.
    pub modularity: f64,
    pub centralization: f64,
}

pub fn topology_report(g: &WeightedGraph, seed: u64) -> Result<TopologyReport> {
    topology_report_adjacency(&g.adjacency(), seed)
}

pub fn topology_report_adjacency(adj: &Adjacency, seed: u64) -> Result<TopologyReport> {
    let modularity = if adj.edge_count() > 0 { modularity_partition(adj, seed)?.1 } else { 0.0 };
    Ok(TopologyReport {
        node_count: adj.node_count(),
        edge_count: adj.edge_count(),
        coverage: coverage(adj),
        transitivity: transitivity(adj),
        modularity,
        centralization: centralization(adj)?,
    })
}
