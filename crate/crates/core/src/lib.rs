//! Bipartite network projection, backbone extraction and the comparison of
//! projection × backboning strategies by the topology they produce.
//!
//! The usual flow is
//!
//! 1. load a [`BipartiteGraph`] with [`ingest::ingest_bipartite`] or draw one
//!    with [`synth::generate_synthetic`];
//! 2. project one side with [`projection::project`];
//! 3. score the projected edges with [`backboning::score`] and cut them at
//!    thresholds from [`backboning::resolve_thresholds`];
//! 4. measure the backbones with [`metrics`], or run every combination at
//!    once with [`lab::run_grid`].

pub mod backboning;
pub mod degree;
pub mod error;
pub mod graph;
pub mod ingest;
pub mod lab;
pub mod metrics;
pub mod numfmt;
mod par;
pub mod projection;
pub mod stats;
pub mod synth;

pub use backboning::{BackboneMethod, ScoredBackbone, ThresholdGrid};
pub use degree::{degree_report, DegreeReport};
pub use error::{Error, Result};
pub use graph::{Adjacency, BipartiteGraph, Side, WeightedEdge, WeightedGraph};
pub use metrics::TopologyReport;
pub use par::with_workers;
pub use projection::{ProjectionMethod, ProjectionSpec};
pub use synth::{generate_synthetic, SyntheticParams};
