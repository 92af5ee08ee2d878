//! Browser bindings: generate a synthetic network, project it, and extract
//! a backbone, all from edge-list text. Every function returns JSON.

use std::io::Cursor;

use backbone_lab::backboning::{extract, resolve_thresholds, score};
use backbone_lab::ingest::{parse_bipartite, write_bipartite, IngestOptions};
use backbone_lab::metrics::topology_report;
use backbone_lab::projection::project;
use backbone_lab::{
    degree_report, generate_synthetic, BackboneMethod, BipartiteGraph, ProjectionMethod, ProjectionSpec, Side,
    SyntheticParams, WeightedGraph,
};
use serde::Serialize;
use wasm_bindgen::prelude::*;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn parse(text: &str) -> Result<BipartiteGraph, String> {
    parse_bipartite(Cursor::new(text), &IngestOptions::default()).map(|(g, _)| g).map_err(err)
}

fn side_of(side: &str) -> Result<Side, String> {
    side.parse().map_err(err)
}

#[derive(Serialize)]
struct Edge<'a> {
    a: &'a str,
    b: &'a str,
    w: f64,
}

fn edges(g: &WeightedGraph, limit: usize) -> Vec<Edge<'_>> {
    let mut all: Vec<Edge> = g
        .edges()
        .iter()
        .map(|e| Edge { a: &g.labels()[e.a as usize], b: &g.labels()[e.b as usize], w: e.weight })
        .collect();
    all.sort_by(|x, y| y.w.total_cmp(&x.w));
    all.truncate(limit);
    all
}

#[derive(Serialize)]
struct Synthetic {
    edge_list: String,
    left_nodes: usize,
    right_nodes: usize,
    edges: usize,
    disassortativity: Option<f64>,
}

/// Draw a synthetic user–domain network and return it as tab-separated text.
#[wasm_bindgen]
pub fn synthesize(n_left: usize, n_right: usize, target: f64, seed: u64) -> Result<String, String> {
    let params = SyntheticParams {
        n_left,
        n_right,
        target_disassortativity: target,
        seed,
        // keep small demo networks from being saturated by the minimum degree
        left_min_degree: SyntheticParams::default().left_min_degree.min(n_right / 4).max(1),
        ..Default::default()
    };
    let g = generate_synthetic(&params).map_err(err)?;
    let mut text = Vec::new();
    write_bipartite(&g, &mut text, '\t').map_err(err)?;
    let out = Synthetic {
        edge_list: String::from_utf8(text).map_err(err)?,
        left_nodes: g.node_count(Side::Left),
        right_nodes: g.node_count(Side::Right),
        edges: g.edge_count(),
        disassortativity: degree_report(&g).pearson.value(),
    };
    serde_json::to_string(&out).map_err(err)
}

#[derive(Serialize)]
struct Projected<'a> {
    method: ProjectionMethod,
    nodes: usize,
    edges: usize,
    total_weight: f64,
    heaviest: Vec<Edge<'a>>,
}

/// Project one side of a bipartite edge list; reports the heaviest edges.
#[wasm_bindgen]
pub fn project_edges(text: &str, method: &str, side: &str) -> Result<String, String> {
    let g = parse(text)?;
    let method: ProjectionMethod = method.parse().map_err(err)?;
    let p = project(&g, &ProjectionSpec::new(method, side_of(side)?)).map_err(err)?;
    let out = Projected {
        method,
        nodes: p.graph.node_count(),
        edges: p.graph.edge_count(),
        total_weight: p.graph.total_weight(),
        heaviest: edges(&p.graph, 25),
    };
    serde_json::to_string(&out).map_err(err)
}

#[derive(Serialize)]
struct Backbone<'a> {
    projection: ProjectionMethod,
    backboning: BackboneMethod,
    fraction: f64,
    cutoff: f64,
    projected_edges: usize,
    kept_edges: usize,
    coverage: f64,
    transitivity: f64,
    modularity: f64,
    centralization: f64,
    heaviest: Vec<Edge<'a>>,
}

/// Project, score, and keep the top `fraction` of edges (plus ties), then
/// measure the backbone.
#[wasm_bindgen]
pub fn backbone(text: &str, projection: &str, backboning: &str, fraction: f64, seed: u64) -> Result<String, String> {
    let g = parse(text)?;
    let projection: ProjectionMethod = projection.parse().map_err(err)?;
    let backboning: BackboneMethod = backboning.parse().map_err(err)?;
    let p = project(&g, &ProjectionSpec::new(projection, Side::Right)).map_err(err)?;
    let scored = score(&p.graph, backboning);
    let grid = resolve_thresholds(&scored, &[fraction]).map_err(err)?;
    let kept = extract(&scored, grid.cutoffs[0]);
    let report = topology_report(&kept, seed).map_err(err)?;
    let out = Backbone {
        projection,
        backboning,
        fraction,
        cutoff: grid.cutoffs[0],
        projected_edges: p.graph.edge_count(),
        kept_edges: kept.edge_count(),
        coverage: report.coverage,
        transitivity: report.transitivity,
        modularity: report.modularity,
        centralization: report.centralization,
        heaviest: edges(&kept, 25),
    };
    serde_json::to_string(&out).map_err(err)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn demo_round_trip() {
        let syn: serde_json::Value = serde_json::from_str(&synthesize(30, 80, -0.3, 1).unwrap()).unwrap();
        let text = syn["edge_list"].as_str().unwrap();
        let p: serde_json::Value = serde_json::from_str(&project_edges(text, "hyperbolic", "right").unwrap()).unwrap();
        assert!(p["edges"].as_u64().unwrap() > 0);
        let b: serde_json::Value = serde_json::from_str(&backbone(text, "simple", "nc", 0.1, 0).unwrap()).unwrap();
        assert!(b["kept_edges"].as_u64().unwrap() <= p["edges"].as_u64().unwrap());
    }

    #[test]
    fn bad_input_is_an_error_string() {
        assert!(project_edges("a\n", "simple", "right").unwrap_err().contains("line 1"));
        assert!(project_edges("a\tb\n", "nope", "right").is_err());
        assert!(backbone("a\tb\n", "simple", "nc", 1.5, 0).is_err());
    }
}
