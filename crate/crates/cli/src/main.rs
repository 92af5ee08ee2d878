use std::path::PathBuf;
use std::process::ExitCode;

use backbone_lab::{BackboneMethod, ProjectionMethod, Side};
use clap::{Args, Parser, Subcommand};

mod commands;
mod config;

/// Project bipartite networks, extract backbones and compare strategies.
#[derive(Debug, Parser)]
#[command(name = "backbone-lab", version)]
struct Cli {
    /// Seed for every random choice (generator, community detection)
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads for the strategy grid; 0 uses all available cores
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Directory that receives output files
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,

    /// JSON run configuration; command-line flags take precedence
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Ingest an edge list and report its size and degree statistics
    IngestStats(IngestStatsArgs),
    /// Generate a synthetic disassortative bipartite edge list
    Simgen(SimgenArgs),
    /// Project one side of a bipartite edge list into a weighted graph
    Project(ProjectArgs),
    /// Score a weighted edge list and keep its most significant edges
    Backbone(BackboneArgs),
    /// Topology of a weighted edge list: coverage, transitivity, modularity, centralization
    Metrics(MetricsArgs),
    /// Run the full projection x backboning x threshold grid
    Pipeline(PipelineArgs),
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Column delimiter of the edge list [default: tab]
    #[arg(long)]
    delimiter: Option<char>,

    /// Right-side identifier to drop (repeatable)
    #[arg(long = "blacklist")]
    blacklist: Vec<String>,

    /// File with one right-side identifier to drop per line
    #[arg(long)]
    blacklist_file: Option<PathBuf>,

    /// Drop edges observed fewer times than this [default: 1]
    #[arg(long)]
    min_multiplicity: Option<u32>,
}

#[derive(Debug, Args)]
struct IngestStatsArgs {
    input: PathBuf,
    #[command(flatten)]
    input_opts: InputArgs,
}

#[derive(Debug, Args)]
struct SimgenArgs {
    /// Users (left side) [default: 400]
    #[arg(long)]
    n_left: Option<usize>,
    /// Domains (right side) [default: 2000]
    #[arg(long)]
    n_right: Option<usize>,
    /// Power-law exponent of user degrees [default: 2.5]
    #[arg(long)]
    left_exponent: Option<f64>,
    /// Power-law exponent of domain degrees [default: 2.5]
    #[arg(long)]
    right_exponent: Option<f64>,
    #[arg(long)]
    left_min_degree: Option<usize>,
    #[arg(long)]
    right_min_degree: Option<usize>,
    /// Target correlation of logged endpoint degrees
    #[arg(long, allow_hyphen_values = true)]
    target: Option<f64>,
}

#[derive(Debug, Args)]
struct ProjectArgs {
    input: PathBuf,
    /// simple, hyperbolic, probs or ycn
    #[arg(long)]
    method: ProjectionMethod,
    #[arg(long, default_value = "right")]
    side: Side,
    /// Convergence tolerance of the YCN power iteration
    #[arg(long)]
    tol: Option<f64>,
    /// Iteration cap of the YCN power iteration
    #[arg(long)]
    max_iter: Option<usize>,
    /// Output file; defaults to projection_<method>_<side>.tsv in the output directory
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[command(flatten)]
    input_opts: InputArgs,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("threshold").required(true).args(["cutoff", "fraction"])))]
struct BackboneArgs {
    /// Weighted edge list (node_a, node_b, weight)
    input: PathBuf,
    /// naive, df or nc
    #[arg(long)]
    method: BackboneMethod,
    /// Keep edges scoring at least this much
    #[arg(long, allow_hyphen_values = true)]
    cutoff: Option<f64>,
    /// Keep this share of the edges (plus ties at the resolved cutoff)
    #[arg(long)]
    fraction: Option<f64>,
    /// Output file; defaults to backbone_<method>.tsv in the output directory
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct MetricsArgs {
    /// Weighted edge list (node_a, node_b, weight[, ...])
    input: PathBuf,
    /// Weighted edge list whose nodes form the universe, so that nodes
    /// missing from INPUT count as uncovered
    #[arg(long)]
    universe: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PipelineArgs {
    /// Bipartite edge list; conflicts with --synthetic
    input: Option<PathBuf>,
    /// Use the synthetic generator with its default parameters
    #[arg(long)]
    synthetic: bool,
    /// Comma-separated projection methods [default: all four]
    #[arg(long, value_delimiter = ',')]
    projections: Option<Vec<ProjectionMethod>>,
    /// Comma-separated backboning methods [default: all three]
    #[arg(long, value_delimiter = ',')]
    backbonings: Option<Vec<BackboneMethod>>,
    /// Retained-edge shares, strictly decreasing
    #[arg(long, value_delimiter = ',')]
    fractions: Option<Vec<f64>>,
    /// Side to project [default: right]
    #[arg(long)]
    side: Option<Side>,
    /// Right-side identifier to drop from the input (repeatable)
    #[arg(long)]
    blacklist: Vec<String>,
}

/// Exit statuses: 0 success, 1 data or runtime error, 2 usage error.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Data(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Data(e.into())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            eprintln!("\nFor more information, try '--help'.");
            ExitCode::from(2)
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
