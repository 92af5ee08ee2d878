//! Pairwise similarity between two graphs over the same node set.

use crate::error::{Error, Result};
use crate::graph::Adjacency;
use crate::metrics::topology::transitivity;
use crate::stats;

fn check_universe(g1: &Adjacency, g2: &Adjacency) -> Result<()> {
    if g1.node_count() != g2.node_count() {
        return Err(Error::NodeUniverseMismatch);
    }
    Ok(())
}

fn intersection_size(a: &[u32], b: &[u32]) -> usize {
    let (mut i, mut j, mut shared) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                shared += 1;
                i += 1;
                j += 1;
            }
        }
    }
    shared
}

/// Mean over nodes of the Jaccard overlap of their two neighbourhoods.
///
/// Nodes isolated in both graphs are left out of the mean; a node isolated
/// in only one graph contributes 0.
pub fn neighbor_jaccard(g1: &Adjacency, g2: &Adjacency) -> Result<f64> {
    check_universe(g1, g2)?;
    let mut total = 0.0;
    let mut counted = 0usize;
    for v in 0..g1.node_count() {
        let (a, b) = (g1.neighbors(v), g2.neighbors(v));
        if a.is_empty() && b.is_empty() {
            continue;
        }
        let shared = intersection_size(a, b);
        total += shared as f64 / (a.len() + b.len() - shared) as f64;
        counted += 1;
    }
    if counted == 0 {
        return Err(Error::UndefinedSimilarity);
    }
    Ok(total / counted as f64)
}

/// `|CC(g1) - CC(g2)|`.
pub fn cc_distance(g1: &Adjacency, g2: &Adjacency) -> f64 {
    (transitivity(g1) - transitivity(g2)).abs()
}

/// `1 - |CC(g1) - CC(g2)|`, so that higher means more alike.
pub fn cc_similarity(g1: &Adjacency, g2: &Adjacency) -> f64 {
    1.0 - cc_distance(g1, g2)
}

/// Spearman correlation of the two degree vectors; isolates count as 0.
pub fn degree_correlation(g1: &Adjacency, g2: &Adjacency) -> Result<f64> {
    check_universe(g1, g2)?;
    if g1.node_count() < 3 {
        return Err(Error::UndefinedCorrelation);
    }
    let d1: Vec<f64> = g1.degrees().into_iter().map(|d| d as f64).collect();
    let d2: Vec<f64> = g2.degrees().into_iter().map(|d| d as f64).collect();
    stats::spearman(&d1, &d2).ok_or(Error::UndefinedCorrelation)
}
