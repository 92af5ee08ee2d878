use std::collections::HashSet;
use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Context as _;
use backbone_lab::backboning::{self, ThresholdGrid};
use backbone_lab::degree::{write_degree_report, Correlation};
use backbone_lab::ingest::{self, IngestOptions, IngestStats};
use backbone_lab::lab;
use backbone_lab::metrics::topology_report;
use backbone_lab::synth::generate_synthetic_detailed;
use backbone_lab::{
    degree_report, with_workers, BackboneMethod, BipartiteGraph, Error, ProjectionMethod, ProjectionSpec, Side,
    SyntheticParams, WeightedEdge, WeightedGraph,
};
use serde::Serialize;

use crate::config::{RunConfig, SyntheticSection};
use crate::{
    BackboneArgs, Cli, Command, Failure, IngestStatsArgs, InputArgs, MetricsArgs, PipelineArgs, ProjectArgs,
    SimgenArgs,
};

struct Context {
    seed: u64,
    workers: usize,
    out_dir: PathBuf,
    file: RunConfig,
}

pub fn run(cli: Cli) -> Result<(), Failure> {
    let file = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let ctx = Context {
        seed: cli.seed.unwrap_or(file.seed),
        workers: cli.workers.unwrap_or(file.workers),
        out_dir: cli.out_dir.clone().or_else(|| file.out_dir.clone()).unwrap_or_else(|| PathBuf::from("out")),
        file,
    };
    match &cli.command {
        Command::Pipeline(args) => pipeline(&ctx, args),
        // only the grid is worth spreading over threads
        other => with_workers(1, || match other {
            Command::IngestStats(args) => ingest_stats(&ctx, args),
            Command::Simgen(args) => simgen(&ctx, args),
            Command::Project(args) => project(&ctx, args),
            Command::Backbone(args) => backbone(&ctx, args),
            Command::Metrics(args) => metrics(&ctx, args),
            Command::Pipeline(_) => unreachable!(),
        }),
    }
}

/// Parameter problems are the caller's fault; everything else is data.
fn classify(e: Error) -> Failure {
    match e {
        Error::InvalidParameter(msg) => Failure::Usage(msg),
        other => Failure::Data(other.into()),
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<(), Failure> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn write_json_file<T: Serialize>(path: &Path, value: &T) -> Result<(), Failure> {
    let mut w = BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn create_out_dir(dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(dir).with_context(|| format!("creating output directory {}", dir.display()))?;
    Ok(())
}

/// Create `path` (and its directory) for buffered writing.
fn create_file(path: &Path) -> Result<BufWriter<File>, Failure> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        create_out_dir(parent)?;
    }
    Ok(BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?))
}

fn sidecar_path(output: &Path) -> PathBuf {
    output.with_extension("json")
}

fn ingest_options(args: &InputArgs, file: &RunConfig) -> Result<IngestOptions, Failure> {
    let mut blacklist: HashSet<String> = file.blacklist_set();
    blacklist.extend(args.blacklist.iter().cloned());
    if let Some(path) = &args.blacklist_file {
        let f = File::open(path).with_context(|| format!("opening blacklist {}", path.display()))?;
        for line in BufReader::new(f).lines() {
            let line = line?;
            let id = line.trim();
            if !id.is_empty() && !id.starts_with('#') {
                blacklist.insert(id.to_string());
            }
        }
    }
    Ok(IngestOptions {
        delimiter: args.delimiter.unwrap_or(file.delimiter),
        blacklist,
        min_multiplicity: args.min_multiplicity.unwrap_or(file.min_multiplicity),
    })
}

fn read_bipartite(path: &Path, options: &IngestOptions) -> Result<(BipartiteGraph, u64), Failure> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let parsed = ingest::parse_bipartite(BufReader::new(f), options).with_context(|| path.display().to_string())?;
    Ok(parsed)
}

fn read_weighted(path: &Path) -> Result<WeightedGraph, Failure> {
    Ok(ingest::read_weighted(path).with_context(|| path.display().to_string())?)
}

#[derive(Serialize)]
struct IngestSummary {
    #[serde(flatten)]
    stats: IngestStats,
    pearson_log_degree: Correlation,
    spearman_log_degree: Correlation,
    files: Vec<String>,
}

fn ingest_stats(ctx: &Context, args: &IngestStatsArgs) -> Result<(), Failure> {
    let options = ingest_options(&args.input_opts, &ctx.file)?;
    let (g, rows) = read_bipartite(&args.input, &options)?;
    let report = degree_report(&g);
    create_out_dir(&ctx.out_dir)?;
    let mut files = write_degree_report(&g, &report, &ctx.out_dir)?;
    let stats = IngestStats::of(&g, rows);
    write_json_file(&ctx.out_dir.join("ingest_stats.json"), &stats)?;
    files.push("ingest_stats.json".into());
    print_json(&IngestSummary {
        stats,
        pearson_log_degree: report.pearson,
        spearman_log_degree: report.spearman,
        files,
    })
}

#[derive(Serialize)]
struct SimgenSummary {
    params: SyntheticParams,
    left_nodes: usize,
    right_nodes: usize,
    edges: usize,
    achieved_disassortativity: Option<f64>,
    rewiring_steps: u64,
    rejected_stub_pairs: usize,
    rigid: bool,
    output: PathBuf,
}

fn simgen(ctx: &Context, args: &SimgenArgs) -> Result<(), Failure> {
    let base = ctx.file.synthetic.clone().unwrap_or_default();
    let section = SyntheticSection {
        n_left: args.n_left.unwrap_or(base.n_left),
        n_right: args.n_right.unwrap_or(base.n_right),
        left_exponent: args.left_exponent.unwrap_or(base.left_exponent),
        right_exponent: args.right_exponent.unwrap_or(base.right_exponent),
        left_min_degree: args.left_min_degree.unwrap_or(base.left_min_degree),
        right_min_degree: args.right_min_degree.unwrap_or(base.right_min_degree),
        target_disassortativity: args.target.unwrap_or(base.target_disassortativity),
    };
    let params = section.params(ctx.seed);
    let out = generate_synthetic_detailed(&params).map_err(classify)?;
    let output = ctx.out_dir.join("synthetic.tsv");
    let mut w = create_file(&output)?;
    ingest::write_bipartite(&out.graph, &mut w, '\t')?;
    w.flush()?;
    let summary = SimgenSummary {
        left_nodes: out.graph.node_count(Side::Left),
        right_nodes: out.graph.node_count(Side::Right),
        edges: out.graph.edge_count(),
        achieved_disassortativity: out.achieved,
        rewiring_steps: out.rewiring_steps,
        rejected_stub_pairs: out.rejected.len(),
        rigid: out.rigid,
        params,
        output: output.clone(),
    };
    write_json_file(&sidecar_path(&output), &summary)?;
    print_json(&summary)
}

#[derive(Serialize)]
struct YcnSummary {
    iterations: usize,
    residual: f64,
    component_size: usize,
}

#[derive(Serialize)]
struct ProjectionSidecar {
    method: ProjectionMethod,
    side: Side,
    nodes: usize,
    edges: usize,
    ycn: Option<YcnSummary>,
    output: PathBuf,
}

fn project(ctx: &Context, args: &ProjectArgs) -> Result<(), Failure> {
    let spec = ProjectionSpec {
        method: args.method,
        side: args.side,
        ycn_tolerance: args.tol.unwrap_or(ctx.file.ycn.tolerance),
        ycn_max_iterations: args.max_iter.unwrap_or(ctx.file.ycn.max_iterations),
    };
    spec.validate().map_err(classify)?;
    let options = ingest_options(&args.input_opts, &ctx.file)?;
    let (g, _) = read_bipartite(&args.input, &options)?;
    let projection = backbone_lab::projection::project(&g, &spec)?;

    let output = args.output.clone().unwrap_or_else(|| {
        ctx.out_dir.join(format!("projection_{}_{}.tsv", args.method, args.side.as_str()))
    });
    let mut w = create_file(&output)?;
    ingest::write_weighted(&projection.graph, &mut w)?;
    w.flush()?;

    let sidecar = ProjectionSidecar {
        method: args.method,
        side: args.side,
        nodes: projection.graph.node_count(),
        edges: projection.graph.edge_count(),
        ycn: projection.ycn.map(|d| YcnSummary {
            iterations: d.iterations,
            residual: d.residual,
            component_size: d.component_size,
        }),
        output: output.clone(),
    };
    write_json_file(&sidecar_path(&output), &sidecar)?;
    print_json(&sidecar)
}

#[derive(Serialize)]
struct BackboneSidecar {
    method: BackboneMethod,
    cutoff: f64,
    fraction: Option<f64>,
    input_edges: usize,
    retained_edges: usize,
    thresholds: Option<ThresholdGrid>,
    output: PathBuf,
}

fn backbone(ctx: &Context, args: &BackboneArgs) -> Result<(), Failure> {
    if let Some(c) = args.cutoff {
        if c.is_nan() {
            return Err(Failure::Usage("--cutoff must be a number".into()));
        }
    }
    if let Some(f) = args.fraction {
        backboning::validate_fractions(&[f]).map_err(classify)?;
    }
    let g = read_weighted(&args.input)?;
    let scored = backboning::score(&g, args.method);
    let (cutoff, thresholds) = match (args.cutoff, args.fraction) {
        (Some(c), _) => (c, None),
        (None, Some(f)) => {
            let grid = backboning::resolve_thresholds(&scored, &[f])?;
            (grid.cutoffs[0], Some(grid))
        }
        (None, None) => unreachable!("clap requires one of --cutoff and --fraction"),
    };

    let output = args.output.clone().unwrap_or_else(|| ctx.out_dir.join(format!("backbone_{}.tsv", args.method)));
    let mut w = create_file(&output)?;
    let retained = backboning::write_scored(&scored, cutoff, &mut w)?;
    w.flush()?;
    if retained == 0 {
        eprintln!("warning: no edge scores at least {cutoff}; the backbone is empty");
    }

    let sidecar = BackboneSidecar {
        method: args.method,
        cutoff,
        fraction: args.fraction,
        input_edges: g.edge_count(),
        retained_edges: retained,
        thresholds,
        output: output.clone(),
    };
    write_json_file(&sidecar_path(&output), &sidecar)?;
    print_json(&sidecar)
}

/// Re-index `g` over the node set of `universe`.
fn embed(g: &WeightedGraph, universe: &WeightedGraph) -> Result<WeightedGraph, Failure> {
    let labels = universe.labels();
    let index = |id: &str| labels.binary_search_by(|l| l.as_str().cmp(id)).ok().map(|i| i as u32);
    let own = g.labels();
    let edges = g
        .edges()
        .iter()
        .map(|e| {
            let (a, b) = (&own[e.a as usize], &own[e.b as usize]);
            match (index(a), index(b)) {
                (Some(x), Some(y)) => Ok(WeightedEdge { a: x.min(y), b: x.max(y), weight: e.weight }),
                _ => Err(anyhow::anyhow!("edge ({a}, {b}) has a node outside the universe")),
            }
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    Ok(WeightedGraph::new(labels.clone(), edges)?)
}

fn metrics(ctx: &Context, args: &MetricsArgs) -> Result<(), Failure> {
    let mut g = read_weighted(&args.input)?;
    if let Some(path) = &args.universe {
        g = embed(&g, &read_weighted(path)?)?;
    }
    let report = topology_report(&g, ctx.seed)?;
    create_out_dir(&ctx.out_dir)?;
    write_json_file(&ctx.out_dir.join("metrics.json"), &report)?;
    print_json(&report)
}

#[derive(Serialize)]
struct PipelineSummary {
    runs: usize,
    out_dir: PathBuf,
    files: usize,
    manifest: PathBuf,
}

fn pipeline(ctx: &Context, args: &PipelineArgs) -> Result<(), Failure> {
    let mut config = ctx.file.clone();
    if let Some(input) = &args.input {
        config.input = Some(input.clone());
    }
    if args.synthetic && config.synthetic.is_none() {
        config.synthetic = Some(SyntheticSection::default());
    }
    if let Some(p) = &args.projections {
        config.projections = p.clone();
    }
    if let Some(b) = &args.backbonings {
        config.backbonings = b.clone();
    }
    if let Some(f) = &args.fractions {
        config.fractions = f.clone();
    }
    if let Some(side) = args.side {
        config.side = side;
    }
    config.blacklist.extend(args.blacklist.iter().cloned());
    config.seed = ctx.seed;

    let grid = config.grid().canonical().map_err(classify)?;
    let g = match (&config.input, &config.synthetic) {
        (Some(input), None) => {
            let options = IngestOptions {
                delimiter: config.delimiter,
                blacklist: config.blacklist_set(),
                min_multiplicity: config.min_multiplicity,
            };
            read_bipartite(input, &options)?.0
        }
        (None, Some(section)) => generate_synthetic_detailed(&section.params(ctx.seed)).map_err(classify)?.graph,
        _ => return Err(Failure::Usage("give exactly one of an input edge list and --synthetic".into())),
    };

    let manifest = with_workers(ctx.workers, || lab::run_pipeline(&g, &grid, &ctx.out_dir))?;
    let runs = grid.projections.len() * grid.backbonings.len() * grid.fractions.len();
    print_json(&PipelineSummary {
        runs,
        out_dir: ctx.out_dir.clone(),
        files: manifest.files.len(),
        manifest: ctx.out_dir.join("manifest.json"),
    })
}
