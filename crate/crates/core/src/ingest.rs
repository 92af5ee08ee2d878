//! Edge-list reading and writing.
//!
//! Bipartite input: one edge per line, `left_id<delim>right_id[<delim>count]`.
//! Lines starting with `#` and blank lines are skipped.

use std::collections::{BTreeMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, Side, WeightedEdge, WeightedGraph};
use crate::numfmt::fmt_real;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IngestOptions {
    pub delimiter: char,
    /// Right-side identifiers to drop before building the graph.
    pub blacklist: HashSet<String>,
    /// Edges observed fewer times than this are dropped.
    pub min_multiplicity: u32,
}

impl Default for IngestOptions {
    fn default() -> Self {
        Self { delimiter: '\t', blacklist: HashSet::new(), min_multiplicity: 1 }
    }
}

/// Counts reported after ingestion.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestStats {
    pub rows: u64,
    pub observations: u64,
    pub left_nodes: usize,
    pub right_nodes: usize,
    pub edges: usize,
}

impl IngestStats {
    pub fn of(graph: &BipartiteGraph, rows: u64) -> Self {
        Self {
            rows,
            observations: graph.total_multiplicity(),
            left_nodes: graph.node_count(Side::Left),
            right_nodes: graph.node_count(Side::Right),
            edges: graph.edge_count(),
        }
    }
}

pub fn ingest_bipartite(path: impl AsRef<Path>, options: &IngestOptions) -> Result<BipartiteGraph> {
    parse_bipartite(BufReader::new(File::open(path)?), options).map(|(g, _)| g)
}

/// Parse an edge list. Returns the graph and the number of data rows read.
pub fn parse_bipartite<R: BufRead>(reader: R, options: &IngestOptions) -> Result<(BipartiteGraph, u64)> {
    let mut counts: BTreeMap<(String, String), u32> = BTreeMap::new();
    let mut rows = 0u64;
    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line?;
        let line = line.trim_end_matches(['\r', '\n']);
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split(options.delimiter);
        let left = fields.next().unwrap_or("").trim();
        let right = fields.next().map(str::trim);
        let count = fields.next().map(str::trim);
        let malformed = |reason: String| Error::MalformedRow { line: lineno, reason };
        let right = match right {
            Some(r) if !r.is_empty() && !left.is_empty() => r,
            _ => return Err(malformed("expected at least two non-empty columns".into())),
        };
        let count = match count {
            None | Some("") => 1,
            Some(c) => match c.parse::<u32>() {
                Ok(n) if n > 0 => n,
                _ => return Err(malformed(format!("count `{c}` is not a positive integer"))),
            },
        };
        rows += 1;
        if options.blacklist.contains(right) {
            continue;
        }
        let slot = counts.entry((left.to_string(), right.to_string())).or_insert(0);
        *slot = slot.saturating_add(count);
    }
    let pairs = counts
        .into_iter()
        .filter(|(_, m)| *m >= options.min_multiplicity)
        .map(|((l, r), m)| (l, r, m));
    Ok((BipartiteGraph::from_pairs(pairs)?, rows))
}

/// Write `left<delim>right<delim>count`, one line per edge.
pub fn write_bipartite<W: Write>(graph: &BipartiteGraph, mut out: W, delimiter: char) -> Result<()> {
    let left = graph.ids(Side::Left);
    let right = graph.ids(Side::Right);
    for e in graph.edges() {
        writeln!(out, "{}{delimiter}{}{delimiter}{}", left[e.left as usize], right[e.right as usize], e.multiplicity)?;
    }
    Ok(())
}

/// Write the identifier-to-index mapping of one side as `index\tid` lines.
pub fn write_node_map<W: Write>(ids: &[String], mut out: W) -> Result<()> {
    writeln!(out, "index\tid")?;
    for (i, id) in ids.iter().enumerate() {
        writeln!(out, "{i}\t{id}")?;
    }
    Ok(())
}

/// Weighted edge list: `node_a\tnode_b\tweight` with 12 significant digits.
pub fn write_weighted<W: Write>(graph: &WeightedGraph, mut out: W) -> Result<()> {
    let labels = graph.labels();
    for e in graph.edges() {
        writeln!(out, "{}\t{}\t{}", labels[e.a as usize], labels[e.b as usize], fmt_real(e.weight))?;
    }
    Ok(())
}

/// Read a weighted edge list. Nodes are the identifiers that appear in it,
/// in lexicographic order.
pub fn parse_weighted<R: BufRead>(reader: R) -> Result<WeightedGraph> {
    let mut rows = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
        if fields.len() < 3 || fields[0].is_empty() || fields[1].is_empty() {
            return Err(Error::MalformedRow { line: lineno, reason: "expected node_a, node_b, weight".into() });
        }
        let weight: f64 = fields[2].parse().map_err(|_| Error::MalformedRow {
            line: lineno,
            reason: format!("weight `{}` is not a number", fields[2]),
        })?;
        if fields[0] == fields[1] {
            return Err(Error::MalformedRow { line: lineno, reason: "self-loop".into() });
        }
        if !(weight > 0.0 && weight.is_finite()) {
            return Err(Error::MalformedRow { line: lineno, reason: "weight must be positive".into() });
        }
        rows.push((fields[0].to_string(), fields[1].to_string(), weight));
    }
    if rows.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let mut ids: Vec<String> = rows.iter().flat_map(|(a, b, _)| [a.clone(), b.clone()]).collect();
    ids.sort_unstable();
    ids.dedup();
    let index = |id: &str| ids.binary_search_by(|s| s.as_str().cmp(id)).unwrap() as u32;
    let edges = rows
        .iter()
        .map(|(a, b, w)| WeightedEdge { a: index(a), b: index(b), weight: *w })
        .collect();
    let labels: Arc<[String]> = ids.clone().into();
    WeightedGraph::new(labels, edges)
}

pub fn read_weighted(path: impl AsRef<Path>) -> Result<WeightedGraph> {
    parse_weighted(BufReader::new(File::open(path)?))
}
