//! Edge significance scoring and backbone extraction.
//!
//! A scorer maps every edge of a weighted graph to a score where higher
//! means "more worth keeping". Backbones keep the edges whose score reaches
//! a cutoff; cutoffs are usually resolved from a target share of retained
//! edges so that different scorers yield comparable edge counts.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::numfmt::fmt_real;

/// Noise-corrected score for an edge whose null variance is zero and whose
/// weight exceeds its expectation.
pub const NC_POSITIVE_SENTINEL: f64 = f64::MAX;
/// Noise-corrected score for a zero-variance edge at or below expectation.
pub const NC_NEGATIVE_SENTINEL: f64 = -f64::MAX;

/// Default retained-edge shares for the nine threshold levels.
pub const DEFAULT_FRACTIONS: [f64; 9] = [0.50, 0.35, 0.25, 0.18, 0.12, 0.08, 0.05, 0.03, 0.02];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BackboneMethod {
    #[serde(rename = "naive")]
    Naive,
    #[serde(rename = "df")]
    DisparityFilter,
    #[serde(rename = "nc")]
    NoiseCorrected,
}

impl BackboneMethod {
    pub const ALL: [BackboneMethod; 3] =
        [BackboneMethod::Naive, BackboneMethod::DisparityFilter, BackboneMethod::NoiseCorrected];

    pub fn as_str(self) -> &'static str {
        match self {
            BackboneMethod::Naive => "naive",
            BackboneMethod::DisparityFilter => "df",
            BackboneMethod::NoiseCorrected => "nc",
        }
    }
}

impl fmt::Display for BackboneMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BackboneMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "naive" => Ok(BackboneMethod::Naive),
            "df" | "disparity" => Ok(BackboneMethod::DisparityFilter),
            "nc" | "noise-corrected" => Ok(BackboneMethod::NoiseCorrected),
            other => Err(Error::InvalidParameter(format!("unknown backboning method `{other}`"))),
        }
    }
}

/// A weighted graph with one score per edge, aligned with `base.edges()`.
#[derive(Clone, Debug)]
pub struct ScoredBackbone {
    pub base: WeightedGraph,
    pub scores: Vec<f64>,
    pub method: BackboneMethod,
}

pub fn score(g: &WeightedGraph, method: BackboneMethod) -> ScoredBackbone {
    match method {
        BackboneMethod::Naive => score_naive(g),
        BackboneMethod::DisparityFilter => score_disparity(g),
        BackboneMethod::NoiseCorrected => score_noise_corrected(g),
    }
}

pub fn score_naive(g: &WeightedGraph) -> ScoredBackbone {
    ScoredBackbone {
        base: g.clone(),
        scores: g.edges().iter().map(|e| e.weight).collect(),
        method: BackboneMethod::Naive,
    }
}

/// Significance of an edge of weight share `p` at a node of degree `k`
/// under the uniform null: `1 - (1 - p)^(k - 1)`; zero for `k = 1`.
pub fn disparity_endpoint_score(p: f64, k: usize) -> f64 {
    if k < 2 {
        return 0.0;
    }
    if p >= 1.0 {
        return 1.0;
    }
    -(((k - 1) as f64) * (-p).ln_1p()).exp_m1()
}

pub fn score_disparity(g: &WeightedGraph) -> ScoredBackbone {
    let strength = g.strengths();
    let degree = g.degrees();
    let scores = g
        .edges()
        .iter()
        .map(|e| {
            let (a, b) = (e.a as usize, e.b as usize);
            let sa = disparity_endpoint_score(e.weight / strength[a], degree[a]);
            let sb = disparity_endpoint_score(e.weight / strength[b], degree[b]);
            sa.max(sb)
        })
        .collect();
    ScoredBackbone { base: g.clone(), scores, method: BackboneMethod::DisparityFilter }
}

/// Null expectation and variance of the edge `(i, j)` from the endpoint
/// strengths and the total weight `T` (each edge counted once).
pub fn noise_corrected_null(s_i: f64, s_j: f64, total: f64) -> (f64, f64) {
    let expected = s_i * s_j / total;
    let variance = expected * (1.0 - s_i / total) * (1.0 - s_j / total);
    (expected, variance)
}

pub fn score_noise_corrected(g: &WeightedGraph) -> ScoredBackbone {
    let strength = g.strengths();
    let total = g.total_weight();
    let scores = g
        .edges()
        .iter()
        .map(|e| {
            let (expected, variance) = noise_corrected_null(strength[e.a as usize], strength[e.b as usize], total);
            if variance > 0.0 {
                (e.weight - expected) / variance.sqrt()
            } else if e.weight > expected * (1.0 + 1e-12) {
                // rounding in s_i·s_j/T must not flip an edge that sits
                // exactly at its expectation
                NC_POSITIVE_SENTINEL
            } else {
                NC_NEGATIVE_SENTINEL
            }
        })
        .collect();
    ScoredBackbone { base: g.clone(), scores, method: BackboneMethod::NoiseCorrected }
}

/// Cutoffs resolved for a list of retained-edge shares.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdGrid {
    pub fractions: Vec<f64>,
    pub cutoffs: Vec<f64>,
    pub retained_counts: Vec<usize>,
}

pub fn validate_fractions(fractions: &[f64]) -> Result<()> {
    if fractions.is_empty() {
        return Err(Error::InvalidParameter("at least one threshold fraction is required".into()));
    }
    if fractions.iter().any(|f| !(*f > 0.0 && *f <= 1.0)) {
        return Err(Error::InvalidParameter("threshold fractions must lie in (0, 1]".into()));
    }
    if fractions.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidParameter("threshold fractions must be strictly decreasing".into()));
    }
    Ok(())
}

/// Number of top-ranked edges a share `fraction` of `m` edges asks for.
fn target_rank(fraction: f64, m: usize) -> usize {
    // tolerate representation error such as 0.35 * 100 = 35.000000000000004
    let raw = fraction * m as f64;
    ((raw - 1e-9 * raw.max(1.0)).ceil() as usize).clamp(1, m)
}

/// For each share `f`, the cutoff is the score of the `ceil(f·|E|)`-th
/// highest edge; extracting at it keeps that many edges plus any ties.
pub fn resolve_thresholds(sb: &ScoredBackbone, fractions: &[f64]) -> Result<ThresholdGrid> {
    validate_fractions(fractions)?;
    let m = sb.scores.len();
    if m == 0 {
        return Err(Error::EmptyGraph);
    }
    let mut sorted = sb.scores.clone();
    sorted.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut cutoffs = Vec::with_capacity(fractions.len());
    let mut retained_counts = Vec::with_capacity(fractions.len());
    for &f in fractions {
        let cutoff = sorted[target_rank(f, m) - 1];
        // number of scores >= cutoff in a descending list
        let retained = sorted.partition_point(|s| *s >= cutoff);
        cutoffs.push(cutoff);
        retained_counts.push(retained);
    }
    Ok(ThresholdGrid { fractions: fractions.to_vec(), cutoffs, retained_counts })
}

/// Edges scoring at least `cutoff`, with their original weights. Every
/// node of the base graph is kept, isolated or not.
pub fn extract(sb: &ScoredBackbone, cutoff: f64) -> WeightedGraph {
    sb.base.filter_edges(|i, _| sb.scores[i] >= cutoff)
}

/// Write `node_a\tnode_b\traw_weight\tscore` for every edge scoring at least
/// `cutoff`. Returns the number of edges written.
pub fn write_scored<W: Write>(sb: &ScoredBackbone, cutoff: f64, mut out: W) -> Result<usize> {
    let labels = sb.base.labels();
    let mut written = 0;
    for (e, &s) in sb.base.edges().iter().zip(&sb.scores) {
        if s >= cutoff {
            let (a, b) = (&labels[e.a as usize], &labels[e.b as usize]);
            writeln!(out, "{a}\t{b}\t{}\t{}", fmt_real(e.weight), fmt_real(s))?;
            written += 1;
        }
    }
    Ok(written)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BinScale {
    Log,
    Linear,
}

/// Histogram of finite scores; the noise-corrected sentinels are counted
/// separately.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoreHistogram {
    pub scale: BinScale,
    /// `counts.len() + 1` ascending bin edges; the last bin is closed.
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
    pub sentinel_high: usize,
    pub sentinel_low: usize,
}

/// Log-spaced bins when every score is positive, linear bins otherwise.
pub fn score_histogram(scores: &[f64], bins: usize) -> ScoreHistogram {
    let bins = bins.max(1);
    let sentinel_high = scores.iter().filter(|&&s| s == NC_POSITIVE_SENTINEL).count();
    let sentinel_low = scores.iter().filter(|&&s| s == NC_NEGATIVE_SENTINEL).count();
    let values: Vec<f64> = scores
        .iter()
        .copied()
        .filter(|&s| s != NC_POSITIVE_SENTINEL && s != NC_NEGATIVE_SENTINEL)
        .collect();
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if values.is_empty() {
        return ScoreHistogram { scale: BinScale::Linear, edges: vec![0.0, 1.0], counts: vec![0], sentinel_high, sentinel_low };
    }
    let scale = if lo > 0.0 { BinScale::Log } else { BinScale::Linear };
    let (a, b) = match scale {
        BinScale::Log => (lo.ln(), hi.ln()),
        BinScale::Linear => (lo, hi),
    };
    let span = if b > a { b - a } else { 1.0 };
    let edges: Vec<f64> = (0..=bins)
        .map(|i| {
            let t = a + span * i as f64 / bins as f64;
            match scale {
                BinScale::Log => t.exp(),
                BinScale::Linear => t,
            }
        })
        .collect();
    let mut counts = vec![0usize; bins];
    for &v in &values {
        let t = match scale {
            BinScale::Log => v.ln(),
            BinScale::Linear => v,
        };
        let bin = (((t - a) / span) * bins as f64).floor() as isize;
        counts[bin.clamp(0, bins as isize - 1) as usize] += 1;
    }
    ScoreHistogram { scale, edges, counts, sentinel_high, sentinel_low }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{numeric_labels, WeightedEdge};

    fn graph(n: usize, edges: &[(u32, u32, f64)]) -> WeightedGraph {
        WeightedGraph::new(
            numeric_labels(n),
            edges.iter().map(|&(a, b, weight)| WeightedEdge { a, b, weight }).collect(),
        )
        .unwrap()
    }

    fn scored(scores: &[f64]) -> ScoredBackbone {
        let n = scores.len() + 1;
        let edges: Vec<_> = (0..scores.len()).map(|i| (0, i as u32 + 1, 1.0)).collect();
        ScoredBackbone { base: graph(n, &edges), scores: scores.to_vec(), method: BackboneMethod::Naive }
    }

    #[test]
    fn naive_is_identity() {
        let g = graph(4, &[(0, 1, 2.0), (1, 2, 5.0), (2, 3, 9.0)]);
        assert_eq!(score_naive(&g).scores, vec![2.0, 5.0, 9.0]);
    }

    #[test]
    fn disparity_one_step_formula() {
        assert!((disparity_endpoint_score(0.75, 2) - 0.75).abs() < 1e-15);
        // node 0 has k=2, s=4; its edge of weight 3 scores 0.75 from that side
        let g = graph(3, &[(0, 1, 3.0), (0, 2, 1.0)]);
        let sb = score_disparity(&g);
        assert!((sb.scores[0] - 0.75).abs() < 1e-15);
    }

    #[test]
    fn disparity_leaf_endpoint_contributes_nothing() {
        // leaves 1 and 2 have k=1; scores come from node 0 only
        let g = graph(3, &[(0, 1, 1.0), (0, 2, 1.0)]);
        let sb = score_disparity(&g);
        assert!((sb.scores[0] - 0.5).abs() < 1e-15);
        let single = graph(2, &[(0, 1, 4.0)]);
        assert_eq!(score_disparity(&single).scores, vec![0.0]);
    }

    #[test]
    fn disparity_unit_weights_approach_one_minus_inverse_e() {
        let k = 2000;
        let s = disparity_endpoint_score(1.0 / k as f64, k);
        assert!((s - (1.0 - (-1f64).exp())).abs() < 1e-3);
    }

    #[test]
    fn noise_corrected_observation_above_expectation_is_positive() {
        // s_i = s_j = 5, T = 10 gives E = 2.5; w = 3 on the edge (0, 1)
        let g = graph(4, &[(0, 1, 3.0), (0, 2, 2.0), (1, 3, 2.0), (2, 3, 3.0)]);
        let s = g.strengths();
        let (e, _) = noise_corrected_null(s[0], s[1], g.total_weight());
        assert!((e - 2.5).abs() < 1e-15);
        let sb = score_noise_corrected(&g);
        assert!(sb.scores[0] > 0.0);
    }

    #[test]
    fn noise_corrected_zero_variance_sentinels() {
        let g = graph(2, &[(0, 1, 2.0)]);
        assert_eq!(score_noise_corrected(&g).scores, vec![NC_NEGATIVE_SENTINEL]);
    }

    #[test]
    fn quantile_cutoff() {
        let sb = scored(&[1.0, 2.0, 3.0, 4.0]);
        let grid = resolve_thresholds(&sb, &[0.5]).unwrap();
        assert_eq!(grid.cutoffs, vec![3.0]);
        assert_eq!(grid.retained_counts, vec![2]);
        let kept = extract(&sb, grid.cutoffs[0]);
        assert_eq!(kept.edges().iter().map(|e| e.b).collect::<Vec<_>>(), vec![3, 4]);
    }

    #[test]
    fn ties_are_all_retained() {
        let sb = scored(&[7.0; 6]);
        let grid = resolve_thresholds(&sb, &[0.9, 0.5, 0.1]).unwrap();
        assert_eq!(grid.retained_counts, vec![6, 6, 6]);
    }

    #[test]
    fn fractions_must_decrease() {
        let sb = scored(&[1.0, 2.0]);
        assert!(resolve_thresholds(&sb, &[0.5, 0.5]).is_err());
        assert!(resolve_thresholds(&sb, &[1.2]).is_err());
        assert!(resolve_thresholds(&sb, &[]).is_err());
        assert!(validate_fractions(&DEFAULT_FRACTIONS).is_ok());
    }

    #[test]
    fn extract_keeps_nodes_and_original_weights() {
        let g = graph(5, &[(0, 1, 2.0), (1, 2, 5.0), (2, 3, 9.0)]);
        let sb = score_disparity(&g);
        let all = extract(&sb, f64::NEG_INFINITY);
        assert_eq!(all.edges(), g.edges());
        let none = extract(&sb, 2.0);
        assert_eq!(none.edge_count(), 0);
        assert_eq!(none.node_count(), 5);
    }

    #[test]
    fn histogram_scales() {
        let h = score_histogram(&[1.0, 10.0, 100.0], 2);
        assert_eq!(h.scale, BinScale::Log);
        assert_eq!(h.counts, vec![1, 2]);
        assert!((h.edges[1] - 10.0).abs() < 1e-9);
        let h = score_histogram(&[-1.0, 0.0, 1.0, NC_POSITIVE_SENTINEL], 2);
        assert_eq!(h.scale, BinScale::Linear);
        assert_eq!(h.counts, vec![1, 2]);
        assert_eq!(h.sentinel_high, 1);
    }
}
