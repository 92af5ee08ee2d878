//! One-mode projections of a bipartite graph.
//!
//! All four methods connect two nodes of the projected side exactly when
//! they share at least one neighbour; they differ only in the weight:
//!
//! * simple: number of shared neighbours;
//! * hyperbolic: each shared neighbour `z` contributes `1/|Γ(z)|`;
//! * ProbS: the two-step random-walk mass `u → z → v`, averaged over both
//!   directions so the result is undirected;
//! * YCN: stationary probability flow of the two-step walk, restricted to
//!   the largest connected component of the projected side.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, Side, WeightedEdge, WeightedGraph};
use crate::par;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProjectionMethod {
    Simple,
    Hyperbolic,
    #[serde(rename = "probs")]
    ProbS,
    Ycn,
}

impl ProjectionMethod {
    pub const ALL: [ProjectionMethod; 4] =
        [ProjectionMethod::Simple, ProjectionMethod::Hyperbolic, ProjectionMethod::ProbS, ProjectionMethod::Ycn];

    pub fn as_str(self) -> &'static str {
        match self {
            ProjectionMethod::Simple => "simple",
            ProjectionMethod::Hyperbolic => "hyperbolic",
            ProjectionMethod::ProbS => "probs",
            ProjectionMethod::Ycn => "ycn",
        }
    }
}

impl fmt::Display for ProjectionMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProjectionMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "simple" => Ok(ProjectionMethod::Simple),
            "hyperbolic" => Ok(ProjectionMethod::Hyperbolic),
            "probs" => Ok(ProjectionMethod::ProbS),
            "ycn" => Ok(ProjectionMethod::Ycn),
            other => Err(Error::InvalidParameter(format!("unknown projection method `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectionSpec {
    pub method: ProjectionMethod,
    pub side: Side,
    pub ycn_tolerance: f64,
    pub ycn_max_iterations: usize,
}

pub const DEFAULT_YCN_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_YCN_MAX_ITERATIONS: usize = 20_000;

impl ProjectionSpec {
    pub fn new(method: ProjectionMethod, side: Side) -> Self {
        Self { method, side, ycn_tolerance: DEFAULT_YCN_TOLERANCE, ycn_max_iterations: DEFAULT_YCN_MAX_ITERATIONS }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.ycn_tolerance > 0.0) {
            return Err(Error::InvalidParameter("ycn_tolerance must be positive".into()));
        }
        if self.ycn_max_iterations == 0 {
            return Err(Error::InvalidParameter("ycn_max_iterations must be at least 1".into()));
        }
        Ok(())
    }
}

/// Power-iteration diagnostics of a YCN projection.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct YcnDiagnostics {
    pub iterations: usize,
    pub residual: f64,
    pub component_size: usize,
    /// Stationary probability per node of the projected side; zero outside
    /// the largest component.
    pub stationary: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct Projection {
    pub graph: WeightedGraph,
    pub ycn: Option<YcnDiagnostics>,
}

pub fn project(g: &BipartiteGraph, spec: &ProjectionSpec) -> Result<Projection> {
    spec.validate()?;
    let graph = match spec.method {
        ProjectionMethod::Simple => project_simple(g, spec.side),
        ProjectionMethod::Hyperbolic => project_hyperbolic(g, spec.side),
        ProjectionMethod::ProbS => project_probs(g, spec.side),
        ProjectionMethod::Ycn => {
            let (graph, diag) = project_ycn(g, spec)?;
            return Ok(Projection { graph, ycn: Some(diag) });
        }
    };
    Ok(Projection { graph, ycn: None })
}

pub fn project_simple(g: &BipartiteGraph, side: Side) -> WeightedGraph {
    pairwise(g, side, |shared, _, _| shared.count as f64)
}

pub fn project_hyperbolic(g: &BipartiteGraph, side: Side) -> WeightedGraph {
    pairwise(g, side, |shared, _, _| shared.inverse_degrees)
}

pub fn project_probs(g: &BipartiteGraph, side: Side) -> WeightedGraph {
    // w(u→v) = Σ_z 1/(|Γ(u)||Γ(z)|), so both directions share the hyperbolic sum
    pairwise(g, side, |shared, ku, kv| 0.5 * (shared.inverse_degrees / ku + shared.inverse_degrees / kv))
}

/// Contributions accumulated over the shared neighbours of a node pair.
#[derive(Clone, Copy, Debug, Default)]
struct Shared {
    count: u32,
    /// Σ over shared neighbours `z` of `1/|Γ(z)|`.
    inverse_degrees: f64,
}

struct RowScratch {
    acc: Vec<Shared>,
    touched: Vec<u32>,
}

impl RowScratch {
    fn new(n: usize) -> Self {
        Self { acc: vec![Shared::default(); n], touched: Vec::new() }
    }
}

/// Shared-neighbour sums between `u` and every `v` accepted by `include`,
/// sorted by `v`. Neighbours of `u` are visited in index order, so the
/// floating-point sums are reproducible.
fn shared_row(
    g: &BipartiteGraph,
    side: Side,
    u: usize,
    scratch: &mut RowScratch,
    include: impl Fn(u32) -> bool,
) -> Vec<(u32, Shared)> {
    let other = side.other();
    for &z in g.neighbors(side, u) {
        let through = g.neighbors(other, z as usize);
        let inv = 1.0 / through.len() as f64;
        for &v in through {
            if !include(v) {
                continue;
            }
            let slot = &mut scratch.acc[v as usize];
            if slot.count == 0 {
                scratch.touched.push(v);
            }
            slot.count += 1;
            slot.inverse_degrees += inv;
        }
    }
    scratch.touched.sort_unstable();
    let row = scratch.touched.iter().map(|&v| (v, scratch.acc[v as usize])).collect();
    for &v in &scratch.touched {
        scratch.acc[v as usize] = Shared::default();
    }
    scratch.touched.clear();
    row
}

fn side_labels(g: &BipartiteGraph, side: Side) -> Arc<[String]> {
    g.ids(side).to_vec().into()
}

fn pairwise(g: &BipartiteGraph, side: Side, weight: impl Fn(Shared, f64, f64) -> f64 + Sync) -> WeightedGraph {
    let n = g.node_count(side);
    let rows = par::map_range_with(
        n,
        || RowScratch::new(n),
        |scratch, u| {
            let ku = g.degree(side, u) as f64;
            shared_row(g, side, u, scratch, |v| v as usize > u)
                .into_iter()
                .map(|(v, shared)| WeightedEdge {
                    a: u as u32,
                    b: v,
                    weight: weight(shared, ku, g.degree(side, v as usize) as f64),
                })
                .collect::<Vec<_>>()
        },
    );
    WeightedGraph::from_sorted_unchecked(side_labels(g, side), rows.into_iter().flatten().collect())
}

/// Connected components of the projected side (two nodes are connected
/// when they share a neighbour). Returns the members of the largest one,
/// sorted; ties go to the component holding the smallest index.
pub fn largest_component(g: &BipartiteGraph, side: Side) -> Vec<u32> {
    let other = side.other();
    let n = g.node_count(side);
    let mut seen = vec![false; n];
    let mut seen_other = vec![false; g.node_count(other)];
    let mut best: Vec<u32> = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut members = vec![start as u32];
        let mut head = 0;
        while head < members.len() {
            let u = members[head] as usize;
            head += 1;
            for &z in g.neighbors(side, u) {
                if std::mem::replace(&mut seen_other[z as usize], true) {
                    continue;
                }
                for &v in g.neighbors(other, z as usize) {
                    if !std::mem::replace(&mut seen[v as usize], true) {
                        members.push(v);
                    }
                }
            }
        }
        if members.len() > best.len() {
            best = members;
        }
    }
    best.sort_unstable();
    best
}

pub fn project_ycn(g: &BipartiteGraph, spec: &ProjectionSpec) -> Result<(WeightedGraph, YcnDiagnostics)> {
    spec.validate()?;
    let side = spec.side;
    let n = g.node_count(side);
    let component = largest_component(g, side);
    let mut local = vec![u32::MAX; n];
    for (i, &u) in component.iter().enumerate() {
        local[u as usize] = i as u32;
    }
    let size = component.len();

    // Row u of the transition matrix is h(u, ·)/|Γ(u)|, self-pair included;
    // h is symmetric so row u also serves as column u.
    let rows: Vec<Vec<(u32, Shared)>> = par::map_range_with(
        size,
        || RowScratch::new(n),
        |scratch, i| {
            shared_row(g, side, component[i] as usize, scratch, |_| true)
                .into_iter()
                .map(|(v, s)| (local[v as usize], s))
                .collect()
        },
    );
    let inv_degree: Vec<f64> = component.iter().map(|&u| 1.0 / g.degree(side, u as usize) as f64).collect();

    let mut pi = vec![1.0 / size as f64; size];
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    // A small step alone does not mean π is close to the fixed point when
    // the walk mixes slowly: the remaining distance is about
    // residual·r/(1-r) for a contraction rate r, estimated from successive
    // residuals. Stop only once that estimate is below the tolerance too.
    let mut converged = false;
    while iterations < spec.ycn_max_iterations {
        iterations += 1;
        let mut next = par::map_range(size, |v| {
            rows[v].iter().map(|&(u, s)| s.inverse_degrees * pi[u as usize] * inv_degree[u as usize]).sum::<f64>()
        });
        let total: f64 = next.iter().sum();
        for p in &mut next {
            *p /= total;
        }
        let previous = residual;
        residual = next.iter().zip(&pi).map(|(a, b)| (a - b).abs()).sum();
        pi = next;
        if residual < spec.ycn_tolerance {
            let rate = residual / previous;
            // below the rounding floor the rate estimate is just noise
            let at_floor = residual <= size as f64 * f64::EPSILON;
            if at_floor || (rate < 1.0 && residual * rate / (1.0 - rate) < spec.ycn_tolerance) {
                converged = true;
                break;
            }
        }
    }
    if !converged {
        return Err(Error::NonConvergence { iterations, residual });
    }

    let mut edges = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        let flow_out = pi[i] * inv_degree[i];
        for &(j, s) in row {
            if (j as usize) <= i {
                continue;
            }
            let j = j as usize;
            let weight = s.inverse_degrees * (flow_out + pi[j] * inv_degree[j]);
            if weight > 0.0 {
                edges.push(WeightedEdge { a: component[i], b: component[j], weight });
            }
        }
    }
    // component is sorted, so edges come out in canonical order
    let graph = WeightedGraph::from_sorted_unchecked(side_labels(g, side), edges);
    let mut stationary = vec![0.0; n];
    for (i, &u) in component.iter().enumerate() {
        stationary[u as usize] = pi[i];
    }
    Ok((graph, YcnDiagnostics { iterations, residual, component_size: size, stationary }))
}
