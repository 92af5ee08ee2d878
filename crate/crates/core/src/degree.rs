//! Degree statistics of a bipartite graph.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use serde::{Deserialize, Serialize, Serializer};

use crate::error::Result;
use crate::graph::{BipartiteGraph, Side};
use crate::numfmt::fmt_real;
use crate::stats;

/// A correlation that may be undefined (zero variance on one side).
#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Correlation {
    Defined(f64),
    Undefined,
}

impl Correlation {
    pub fn value(self) -> Option<f64> {
        match self {
            Correlation::Defined(v) => Some(v),
            Correlation::Undefined => None,
        }
    }
}

impl From<Option<f64>> for Correlation {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Correlation::Undefined, Correlation::Defined)
    }
}

impl Serialize for Correlation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Correlation::Defined(v) => s.serialize_f64(*v),
            Correlation::Undefined => s.serialize_str("undefined"),
        }
    }
}

/// Point of a complementary cumulative distribution: the share of nodes
/// with degree at least `degree`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CcdfPoint {
    pub degree: usize,
    pub share: f64,
}

/// Edge count in one cell of the joint degree histogram. Bin `b` covers
/// degrees in `[2^b, 2^(b+1))`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct JointBin {
    pub left_bin: u32,
    pub right_bin: u32,
    pub edges: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DegreeReport {
    pub left_degrees: Vec<usize>,
    pub right_degrees: Vec<usize>,
    pub left_ccdf: Vec<CcdfPoint>,
    pub right_ccdf: Vec<CcdfPoint>,
    pub joint_histogram: Vec<JointBin>,
    /// Correlation of `ln(left degree)` and `ln(right degree)` over edges.
    pub pearson: Correlation,
    pub spearman: Correlation,
}

pub fn log2_bin(degree: usize) -> u32 {
    debug_assert!(degree > 0);
    usize::BITS - 1 - degree.leading_zeros()
}

fn ccdf(degrees: &[usize]) -> Vec<CcdfPoint> {
    let mut sorted = degrees.to_vec();
    sorted.sort_unstable();
    let n = sorted.len() as f64;
    let mut points = Vec::new();
    let mut i = 0;
    while i < sorted.len() {
        let d = sorted[i];
        points.push(CcdfPoint { degree: d, share: (sorted.len() - i) as f64 / n });
        while i < sorted.len() && sorted[i] == d {
            i += 1;
        }
    }
    points
}

/// Logged endpoint degrees for every edge, `(ln k_left, ln k_right)`.
pub fn logged_endpoint_degrees(g: &BipartiteGraph) -> (Vec<f64>, Vec<f64>) {
    g.edges()
        .iter()
        .map(|e| {
            (
                (g.degree(Side::Left, e.left as usize) as f64).ln(),
                (g.degree(Side::Right, e.right as usize) as f64).ln(),
            )
        })
        .unzip()
}

pub fn degree_report(g: &BipartiteGraph) -> DegreeReport {
    let left_degrees = g.degrees(Side::Left);
    let right_degrees = g.degrees(Side::Right);
    let mut joint: BTreeMap<(u32, u32), usize> = BTreeMap::new();
    for e in g.edges() {
        let key = (log2_bin(left_degrees[e.left as usize]), log2_bin(right_degrees[e.right as usize]));
        *joint.entry(key).or_insert(0) += 1;
    }
    let (x, y) = logged_endpoint_degrees(g);
    DegreeReport {
        left_ccdf: ccdf(&left_degrees),
        right_ccdf: ccdf(&right_degrees),
        joint_histogram: joint
            .into_iter()
            .map(|((left_bin, right_bin), edges)| JointBin { left_bin, right_bin, edges })
            .collect(),
        pearson: stats::pearson(&x, &y).into(),
        spearman: stats::spearman(&x, &y).into(),
        left_degrees,
        right_degrees,
    }
}

#[derive(Serialize)]
struct Summary<'a> {
    left_nodes: usize,
    right_nodes: usize,
    edges: usize,
    observations: u64,
    left_max_degree: usize,
    right_max_degree: usize,
    left_mean_degree: f64,
    right_mean_degree: f64,
    pearson_log_degree: &'a Correlation,
    spearman_log_degree: &'a Correlation,
}

/// Writes one CSV per statistic plus `degree_summary.json` into `dir`.
/// Returns the file names written.
pub fn write_degree_report(g: &BipartiteGraph, report: &DegreeReport, dir: &Path) -> Result<Vec<String>> {
    let mut written = Vec::new();
    for (side, degrees, ccdf) in [
        (Side::Left, &report.left_degrees, &report.left_ccdf),
        (Side::Right, &report.right_degrees, &report.right_ccdf),
    ] {
        let name = format!("degrees_{}.csv", side.as_str());
        let mut w = csv::Writer::from_path(dir.join(&name))?;
        w.write_record(["index", "id", "degree"])?;
        for (i, (id, d)) in g.ids(side).iter().zip(degrees).enumerate() {
            w.write_record([i.to_string(), id.clone(), d.to_string()])?;
        }
        w.flush()?;
        written.push(name);

        let name = format!("ccdf_{}.csv", side.as_str());
        let mut w = csv::Writer::from_path(dir.join(&name))?;
        w.write_record(["degree", "share_at_least"])?;
        for p in ccdf {
            w.write_record([p.degree.to_string(), fmt_real(p.share)])?;
        }
        w.flush()?;
        written.push(name);
    }

    let name = "joint_degree.csv".to_string();
    let mut w = csv::Writer::from_path(dir.join(&name))?;
    w.write_record(["left_bin", "left_min_degree", "right_bin", "right_min_degree", "edges"])?;
    for b in &report.joint_histogram {
        w.write_record([
            b.left_bin.to_string(),
            (1usize << b.left_bin).to_string(),
            b.right_bin.to_string(),
            (1usize << b.right_bin).to_string(),
            b.edges.to_string(),
        ])?;
    }
    w.flush()?;
    written.push(name);

    let mean = |d: &[usize]| d.iter().sum::<usize>() as f64 / d.len() as f64;
    let summary = Summary {
        left_nodes: report.left_degrees.len(),
        right_nodes: report.right_degrees.len(),
        edges: g.edge_count(),
        observations: g.total_multiplicity(),
        left_max_degree: report.left_degrees.iter().copied().max().unwrap_or(0),
        right_max_degree: report.right_degrees.iter().copied().max().unwrap_or(0),
        left_mean_degree: mean(&report.left_degrees),
        right_mean_degree: mean(&report.right_degrees),
        pearson_log_degree: &report.pearson,
        spearman_log_degree: &report.spearman,
    };
    let name = "degree_summary.json".to_string();
    serde_json::to_writer_pretty(BufWriter::new(File::create(dir.join(&name))?), &summary)?;
    written.push(name);
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_bipartite_is_undefined() {
        let g = BipartiteGraph::from_pairs([("a", "x", 1), ("a", "y", 1), ("b", "x", 1), ("b", "y", 1)]).unwrap();
        let r = degree_report(&g);
        assert_eq!(r.left_degrees, vec![2, 2]);
        assert_eq!(r.right_degrees, vec![2, 2]);
        assert_eq!(r.pearson, Correlation::Undefined);
        assert_eq!(r.spearman, Correlation::Undefined);
        assert_eq!(serde_json::to_string(&r.pearson).unwrap(), "\"undefined\"");
    }

    #[test]
    fn star_degrees() {
        let k = 7;
        let g = BipartiteGraph::from_pairs((0..k).map(|i| (format!("u{i}"), "hub", 1))).unwrap();
        let r = degree_report(&g);
        assert_eq!(r.right_degrees, vec![k]);
        assert!(r.left_degrees.iter().all(|&d| d == 1));
        assert_eq!(r.joint_histogram, vec![JointBin { left_bin: 0, right_bin: 2, edges: k }]);
    }

    #[test]
    fn histogram_mass_equals_edges_and_ccdf_starts_at_one() {
        let g = BipartiteGraph::from_pairs([
            ("a", "x", 1),
            ("a", "y", 1),
            ("a", "z", 1),
            ("b", "x", 1),
            ("c", "x", 2),
        ])
        .unwrap();
        let r = degree_report(&g);
        assert_eq!(r.joint_histogram.iter().map(|b| b.edges).sum::<usize>(), g.edge_count());
        assert_eq!(r.left_ccdf[0], CcdfPoint { degree: 1, share: 1.0 });
        assert_eq!(r.right_ccdf.last().unwrap().degree, 3);
        // hub user a (deg 3) links to leaf domains y, z: disassortative
        assert!(r.pearson.value().unwrap() < 0.0);
        assert!(r.spearman.value().unwrap() < 0.0);
    }

    #[test]
    fn log2_bins() {
        assert_eq!(log2_bin(1), 0);
        assert_eq!(log2_bin(2), 1);
        assert_eq!(log2_bin(3), 1);
        assert_eq!(log2_bin(1024), 10);
    }
}
