//! The strategy grid: every projection × backboning combination at every
//! threshold level, compared pairwise and clustered by how alike the
//! resulting backbones are.
//!
//! Runs are ordered canonically by (projection, backboning, level), with
//! projections in the order simple, hyperbolic, probs, ycn and backbonings
//! in the order naive, df, nc. That order labels the rows and columns of
//! every similarity matrix.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::backboning::{self, BackboneMethod, ScoreHistogram, ThresholdGrid, DEFAULT_FRACTIONS};
use crate::error::{Error, Result};
use crate::graph::{Adjacency, BipartiteGraph, Side, WeightedGraph};
use crate::ingest::write_node_map;
use crate::metrics::community::{best_partition, CommunityGraph};
use crate::metrics::{self, TopologyReport};
use crate::numfmt::{fmt_opt, fmt_real};
use crate::par;
use crate::projection::{self, ProjectionMethod, ProjectionSpec, YcnDiagnostics};
use crate::stats;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct YcnSettings {
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for YcnSettings {
    fn default() -> Self {
        Self { tolerance: projection::DEFAULT_YCN_TOLERANCE, max_iterations: projection::DEFAULT_YCN_MAX_ITERATIONS }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridConfig {
    pub projections: Vec<ProjectionMethod>,
    pub backbonings: Vec<BackboneMethod>,
    pub fractions: Vec<f64>,
    pub side: Side,
    pub seed: u64,
    pub ycn: YcnSettings,
    pub histogram_bins: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            projections: ProjectionMethod::ALL.to_vec(),
            backbonings: BackboneMethod::ALL.to_vec(),
            fractions: DEFAULT_FRACTIONS.to_vec(),
            side: Side::Right,
            seed: 0,
            ycn: YcnSettings::default(),
            histogram_bins: 40,
        }
    }
}

impl GridConfig {
    /// Sorted, de-duplicated method lists; validated fractions.
    pub fn canonical(&self) -> Result<GridConfig> {
        let mut c = self.clone();
        c.projections.sort();
        c.projections.dedup();
        c.backbonings.sort();
        c.backbonings.dedup();
        if c.projections.is_empty() || c.backbonings.is_empty() {
            return Err(Error::InvalidParameter("grid needs at least one projection and one backboning".into()));
        }
        backboning::validate_fractions(&c.fractions)?;
        Ok(c)
    }

    fn projection_spec(&self, method: ProjectionMethod) -> ProjectionSpec {
        ProjectionSpec {
            method,
            side: self.side,
            ycn_tolerance: self.ycn.tolerance,
            ycn_max_iterations: self.ycn.max_iterations,
        }
    }
}

/// One (projection, backboning, level) cell of the grid.
#[derive(Clone, Debug)]
pub struct StrategyRun {
    pub projection: ProjectionMethod,
    pub backboning: BackboneMethod,
    /// 1-based threshold level; higher levels keep fewer edges.
    pub level: usize,
    pub fraction: f64,
    pub cutoff: f64,
    pub backbone: WeightedGraph,
    pub report: TopologyReport,
    /// Score histogram of the whole scored projection (shared by the levels
    /// of one strategy).
    pub histogram: Arc<ScoreHistogram>,
    pub thresholds: Arc<ThresholdGrid>,
    pub ycn: Option<Arc<YcnDiagnostics>>,
}

impl StrategyRun {
    pub fn strategy(&self) -> String {
        strategy_name(self.projection, self.backboning)
    }

    pub fn label(&self) -> String {
        format!("{}+{}@{}", self.projection, self.backboning, self.level)
    }
}

pub fn strategy_name(p: ProjectionMethod, b: BackboneMethod) -> String {
    format!("{p}+{b}")
}

struct ScoredStrategy {
    projection: ProjectionMethod,
    backboning: BackboneMethod,
    scored: backboning::ScoredBackbone,
    thresholds: Arc<ThresholdGrid>,
    histogram: Arc<ScoreHistogram>,
    ycn: Option<Arc<YcnDiagnostics>>,
}

fn cell_error(cell: String) -> impl FnOnce(Error) -> Error {
    move |e| Error::Cell { cell, source: Box::new(e) }
}

/// A grid cell's backbone before any topology is measured.
#[derive(Clone, Debug)]
pub struct GridCell {
    pub projection: ProjectionMethod,
    pub backboning: BackboneMethod,
    pub level: usize,
    pub fraction: f64,
    pub cutoff: f64,
    pub backbone: WeightedGraph,
    pub histogram: Arc<ScoreHistogram>,
    pub thresholds: Arc<ThresholdGrid>,
    pub ycn: Option<Arc<YcnDiagnostics>>,
}

impl GridCell {
    pub fn label(&self) -> String {
        format!("{}+{}@{}", self.projection, self.backboning, self.level)
    }
}

/// Project, score and threshold every cell, in canonical order.
pub fn grid_backbones(g: &BipartiteGraph, config: &GridConfig) -> Result<Vec<GridCell>> {
    let config = config.canonical()?;

    let projections = par::map_range(config.projections.len(), |i| {
        let method = config.projections[i];
        projection::project(g, &config.projection_spec(method)).map_err(cell_error(format!("projection {method}")))
    });
    let projections: Vec<_> = projections.into_iter().collect::<Result<_>>()?;

    let pairs: Vec<(usize, BackboneMethod)> = (0..projections.len())
        .flat_map(|p| config.backbonings.iter().map(move |&b| (p, b)))
        .collect();
    let strategies = par::map_range(pairs.len(), |i| {
        let (p, method) = pairs[i];
        let name = strategy_name(config.projections[p], method);
        let base = &projections[p];
        if base.graph.edge_count() == 0 {
            return Err(cell_error(name)(Error::EmptyGraph));
        }
        let scored = backboning::score(&base.graph, method);
        let thresholds = backboning::resolve_thresholds(&scored, &config.fractions).map_err(cell_error(name))?;
        let histogram = backboning::score_histogram(&scored.scores, config.histogram_bins);
        Ok(ScoredStrategy {
            projection: config.projections[p],
            backboning: method,
            scored,
            thresholds: Arc::new(thresholds),
            histogram: Arc::new(histogram),
            ycn: base.ycn.clone().map(Arc::new),
        })
    });
    let strategies: Vec<ScoredStrategy> = strategies.into_iter().collect::<Result<_>>()?;

    let levels = config.fractions.len();
    Ok(par::map_range(strategies.len() * levels, |i| {
        let s = &strategies[i / levels];
        let level = i % levels;
        let cutoff = s.thresholds.cutoffs[level];
        GridCell {
            projection: s.projection,
            backboning: s.backboning,
            level: level + 1,
            fraction: config.fractions[level],
            cutoff,
            backbone: backboning::extract(&s.scored, cutoff),
            histogram: s.histogram.clone(),
            thresholds: s.thresholds.clone(),
            ycn: s.ycn.clone(),
        }
    }))
}

/// Run every cell of the grid. Cells are independent and run in parallel;
/// the result is in canonical order.
pub fn run_grid(g: &BipartiteGraph, config: &GridConfig) -> Result<Vec<StrategyRun>> {
    let config = config.canonical()?;
    let cells = grid_backbones(g, &config)?;
    let reports = par::map_range(cells.len(), |i| {
        metrics::topology_report(&cells[i].backbone, config.seed).map_err(cell_error(cells[i].label()))
    });
    cells
        .into_iter()
        .zip(reports)
        .map(|(cell, report)| {
            Ok(StrategyRun {
                projection: cell.projection,
                backboning: cell.backboning,
                level: cell.level,
                fraction: cell.fraction,
                cutoff: cell.cutoff,
                backbone: cell.backbone,
                report: report?,
                histogram: cell.histogram,
                thresholds: cell.thresholds,
                ycn: cell.ycn,
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SimilarityMetric {
    Jaccard,
    #[serde(rename = "cc")]
    ClusteringCoeff,
    #[serde(rename = "degree")]
    DegreeCorr,
}

impl SimilarityMetric {
    pub const ALL: [SimilarityMetric; 3] =
        [SimilarityMetric::Jaccard, SimilarityMetric::ClusteringCoeff, SimilarityMetric::DegreeCorr];

    pub fn as_str(self) -> &'static str {
        match self {
            SimilarityMetric::Jaccard => "jaccard",
            SimilarityMetric::ClusteringCoeff => "cc",
            SimilarityMetric::DegreeCorr => "degree",
        }
    }
}

/// Square matrix over runs; `None` marks pairs where the metric is undefined.
#[derive(Clone, Debug, PartialEq)]
pub struct SimilarityMatrix {
    pub metric: SimilarityMetric,
    pub labels: Vec<String>,
    values: Vec<Option<f64>>,
}

impl SimilarityMatrix {
    pub fn from_values(metric: SimilarityMetric, labels: Vec<String>, values: Vec<Option<f64>>) -> Result<Self> {
        if values.len() != labels.len() * labels.len() {
            return Err(Error::InvalidParameter("matrix size does not match its labels".into()));
        }
        Ok(Self { metric, labels, values })
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        self.values[i * self.size() + j]
    }
}

/// Per-run quantities reused across all pairs.
struct RunProfile {
    adjacency: Adjacency,
    transitivity: f64,
    degree_ranks: Vec<f64>,
}

pub fn similarity_matrices(runs: &[StrategyRun]) -> Result<[SimilarityMatrix; 3]> {
    let graphs: Vec<&WeightedGraph> = runs.iter().map(|r| &r.backbone).collect();
    let labels = runs.iter().map(StrategyRun::label).collect();
    similarity_matrices_of(&graphs, labels)
}

pub fn similarity_matrices_of(graphs: &[&WeightedGraph], labels: Vec<String>) -> Result<[SimilarityMatrix; 3]> {
    let mut all = compare(graphs, labels, &SimilarityMetric::ALL)?.into_iter();
    Ok([all.next().unwrap(), all.next().unwrap(), all.next().unwrap()])
}

/// One matrix alone; cheaper than [`similarity_matrices_of`] when the
/// neighbour Jaccard is not needed.
pub fn similarity_matrix(
    metric: SimilarityMetric,
    graphs: &[&WeightedGraph],
    labels: Vec<String>,
) -> Result<SimilarityMatrix> {
    Ok(compare(graphs, labels, &[metric])?.pop().unwrap())
}

fn compare(graphs: &[&WeightedGraph], labels: Vec<String>, wanted: &[SimilarityMetric]) -> Result<Vec<SimilarityMatrix>> {
    let n = graphs.len();
    if n < 2 {
        return Err(Error::InvalidParameter("need at least two runs to compare".into()));
    }
    if labels.len() != n {
        return Err(Error::InvalidParameter("one label per run is required".into()));
    }
    if graphs.iter().any(|g| !g.same_universe(graphs[0])) {
        return Err(Error::NodeUniverseMismatch);
    }
    let profiles = par::map_range(n, |i| {
        let adjacency = graphs[i].adjacency();
        let degrees: Vec<f64> = adjacency.degrees().into_iter().map(|d| d as f64).collect();
        RunProfile {
            transitivity: metrics::transitivity(&adjacency),
            degree_ranks: stats::average_ranks(&degrees),
            adjacency,
        }
    });
    let entry = |metric: SimilarityMetric, a: &RunProfile, b: &RunProfile| match metric {
        SimilarityMetric::Jaccard => metrics::neighbor_jaccard(&a.adjacency, &b.adjacency).ok(),
        SimilarityMetric::ClusteringCoeff => Some(1.0 - (a.transitivity - b.transitivity).abs()),
        // Spearman is Pearson on average ranks
        SimilarityMetric::DegreeCorr if a.degree_ranks.len() >= 3 => stats::pearson(&a.degree_ranks, &b.degree_ranks),
        SimilarityMetric::DegreeCorr => None,
    };
    let rows = par::map_range(n, |i| {
        (i..n)
            .map(|j| wanted.iter().map(|&m| entry(m, &profiles[i], &profiles[j])).collect::<Vec<_>>())
            .collect::<Vec<_>>()
    });
    let mut values = vec![vec![None; n * n]; wanted.len()];
    for (i, row) in rows.into_iter().enumerate() {
        for (offset, cell) in row.into_iter().enumerate() {
            let j = i + offset;
            for (k, v) in cell.into_iter().enumerate() {
                values[k][i * n + j] = v;
                values[k][j * n + i] = v;
            }
        }
    }
    Ok(wanted
        .iter()
        .zip(values)
        .map(|(&metric, values)| SimilarityMatrix { metric, labels: labels.clone(), values })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrategyClustering {
    pub metric: SimilarityMetric,
    /// Clusters of run labels, ordered by their first member.
    pub clusters: Vec<Vec<String>>,
    pub modularity: f64,
}

impl StrategyClustering {
    pub fn cluster_of(&self, label: &str) -> Option<usize> {
        self.clusters.iter().position(|c| c.iter().any(|l| l == label))
    }
}

/// Community detection on the matrix read as a complete weighted graph.
/// Missing and negative similarities carry no weight.
pub fn cluster_strategies(m: &SimilarityMatrix, seed: u64) -> Result<StrategyClustering> {
    let n = m.size();
    let defined_rows = (0..n).filter(|&i| (0..n).any(|j| j != i && m.get(i, j).is_some())).count();
    if defined_rows < 2 {
        return Err(Error::InvalidParameter("similarity matrix has fewer than two defined rows".into()));
    }
    let edges = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter_map(|(i, j)| {
        m.get(i, j).filter(|w| *w > 0.0).map(|w| (i as u32, j as u32, w))
    });
    let graph = CommunityGraph::from_weighted_edges(n, edges);
    let (partition, modularity) = best_partition(&graph, seed);
    let k = partition.iter().copied().max().map_or(0, |c| c + 1);
    let mut clusters = vec![Vec::new(); k];
    for (i, &c) in partition.iter().enumerate() {
        clusters[c].push(m.labels[i].clone());
    }
    Ok(StrategyClustering { metric: m.metric, clusters, modularity })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CentralizationRow {
    pub projection: ProjectionMethod,
    pub backboning: BackboneMethod,
    pub level: usize,
    pub fraction: f64,
    pub centralization: f64,
}

pub fn centralization_grid(runs: &[StrategyRun]) -> Vec<CentralizationRow> {
    runs.iter()
        .map(|r| CentralizationRow {
            projection: r.projection,
            backboning: r.backboning,
            level: r.level,
            fraction: r.fraction,
            centralization: r.report.centralization,
        })
        .collect()
}

/// Everything the grid produces, before it is written out.
#[derive(Clone, Debug)]
pub struct PipelineOutput {
    pub config: GridConfig,
    pub runs: Vec<StrategyRun>,
    pub matrices: Option<[SimilarityMatrix; 3]>,
    pub clusterings: Vec<StrategyClustering>,
}

pub fn pipeline(g: &BipartiteGraph, config: &GridConfig) -> Result<PipelineOutput> {
    let config = config.canonical()?;
    let runs = run_grid(g, &config)?;
    let (matrices, clusterings) = if runs.len() >= 2 {
        let matrices = similarity_matrices(&runs)?;
        let clusterings = matrices
            .iter()
            .filter_map(|m| cluster_strategies(m, config.seed).ok())
            .collect();
        (Some(matrices), clusterings)
    } else {
        (None, Vec::new())
    };
    Ok(PipelineOutput { config, runs, matrices, clusterings })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub name: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub files: Vec<ManifestEntry>,
}

/// Round to the 12 significant digits used by every text output.
fn round12(x: f64) -> f64 {
    if x.is_finite() {
        fmt_real(x).parse().unwrap_or(x)
    } else {
        x
    }
}

pub fn write_runs_csv<W: Write>(runs: &[StrategyRun], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "label",
        "projection",
        "backboning",
        "level",
        "fraction",
        "cutoff",
        "node_count",
        "edge_count",
        "coverage",
        "transitivity",
        "modularity",
        "centralization",
    ])?;
    for r in runs {
        w.write_record([
            r.label(),
            r.projection.to_string(),
            r.backboning.to_string(),
            r.level.to_string(),
            fmt_real(r.fraction),
            fmt_real(r.cutoff),
            r.report.node_count.to_string(),
            r.report.edge_count.to_string(),
            fmt_real(r.report.coverage),
            fmt_real(r.report.transitivity),
            fmt_real(r.report.modularity),
            fmt_real(r.report.centralization),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_histogram_csv<W: Write>(h: &ScoreHistogram, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["kind", "bin_lo", "bin_hi", "count"])?;
    let kind = match h.scale {
        backboning::BinScale::Log => "log_bin",
        backboning::BinScale::Linear => "linear_bin",
    };
    for (i, c) in h.counts.iter().enumerate() {
        w.write_record([kind.to_string(), fmt_real(h.edges[i]), fmt_real(h.edges[i + 1]), c.to_string()])?;
    }
    w.write_record(["sentinel_high", "NA", "NA", &h.sentinel_high.to_string()])?;
    w.write_record(["sentinel_low", "NA", "NA", &h.sentinel_low.to_string()])?;
    w.flush()?;
    Ok(())
}

fn write_matrix_csv<W: Write>(labels: &[String], value: impl Fn(usize, usize) -> Option<f64>, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(std::iter::once("run".to_string()).chain(labels.iter().cloned()))?;
    for (i, label) in labels.iter().enumerate() {
        w.write_record(std::iter::once(label.clone()).chain((0..labels.len()).map(|j| fmt_opt(value(i, j)))))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_similarity_csv<W: Write>(m: &SimilarityMatrix, out: W) -> Result<()> {
    write_matrix_csv(&m.labels, |i, j| m.get(i, j), out)
}

pub fn write_centralization_csv<W: Write>(rows: &[CentralizationRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["projection", "backboning", "level", "fraction", "centralization"])?;
    for r in rows {
        w.write_record([
            r.projection.to_string(),
            r.backboning.to_string(),
            r.level.to_string(),
            fmt_real(r.fraction),
            fmt_real(r.centralization),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct ThresholdRecord {
    strategy: String,
    fractions: Vec<f64>,
    cutoffs: Vec<f64>,
    retained_counts: Vec<usize>,
}

#[derive(Serialize)]
struct ClusterRecord<'a> {
    metric: SimilarityMetric,
    modularity: f64,
    clusters: &'a [Vec<String>],
}

#[derive(Serialize)]
struct YcnRecord {
    iterations: usize,
    residual: f64,
    component_size: usize,
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

fn create<P: AsRef<Path>>(path: P) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

/// Write every grid artefact into `dir` and return the manifest, which is
/// also saved as `manifest.json`.
pub fn write_pipeline(g: &BipartiteGraph, output: &PipelineOutput, dir: &Path) -> Result<Manifest> {
    fs::create_dir_all(dir)?;
    let mut names: Vec<String> = Vec::new();
    let mut record = |name: String| names.push(name);

    write_json(&dir.join("config.json"), &output.config)?;
    record("config.json".into());

    for side in [Side::Left, Side::Right] {
        let name = format!("nodes_{}.tsv", side.as_str());
        let mut w = create(dir.join(&name))?;
        write_node_map(g.ids(side), &mut w)?;
        w.flush()?;
        record(name);
    }

    let mut w = create(dir.join("runs.csv"))?;
    write_runs_csv(&output.runs, &mut w)?;
    w.flush()?;
    record("runs.csv".into());

    let mut thresholds = Vec::new();
    let mut ycn = None;
    for run in output.runs.iter().filter(|r| r.level == 1) {
        let name = format!("hist_{}_{}.csv", run.projection, run.backboning);
        let mut w = create(dir.join(&name))?;
        write_histogram_csv(&run.histogram, &mut w)?;
        w.flush()?;
        record(name);
        thresholds.push(ThresholdRecord {
            strategy: run.strategy(),
            fractions: run.thresholds.fractions.clone(),
            cutoffs: run.thresholds.cutoffs.iter().map(|&c| round12(c)).collect(),
            retained_counts: run.thresholds.retained_counts.clone(),
        });
        if let Some(d) = &run.ycn {
            ycn = Some(YcnRecord { iterations: d.iterations, residual: round12(d.residual), component_size: d.component_size });
        }
    }
    write_json(&dir.join("thresholds.json"), &thresholds)?;
    record("thresholds.json".into());
    if let Some(ycn) = ycn {
        write_json(&dir.join("ycn.json"), &ycn)?;
        record("ycn.json".into());
    }

    if let Some(matrices) = &output.matrices {
        for m in matrices {
            let name = format!("sim_{}.csv", m.metric.as_str());
            let mut w = create(dir.join(&name))?;
            write_similarity_csv(m, &mut w)?;
            w.flush()?;
            record(name);
        }
        let transitivity: Vec<f64> = output.runs.iter().map(|r| r.report.transitivity).collect();
        let mut w = create(dir.join("sim_cc_distance.csv"))?;
        write_matrix_csv(&matrices[1].labels, |i, j| Some((transitivity[i] - transitivity[j]).abs()), &mut w)?;
        w.flush()?;
        record("sim_cc_distance.csv".into());
    }
    for c in &output.clusterings {
        let name = format!("clusters_{}.json", c.metric.as_str());
        write_json(
            &dir.join(&name),
            &ClusterRecord { metric: c.metric, modularity: round12(c.modularity), clusters: &c.clusters },
        )?;
        record(name);
    }

    let mut w = create(dir.join("centralization.csv"))?;
    write_centralization_csv(&centralization_grid(&output.runs), &mut w)?;
    w.flush()?;
    record("centralization.csv".into());

    names.sort();
    let files = names
        .into_iter()
        .map(|name| {
            let bytes = fs::read(dir.join(&name))?;
            Ok(ManifestEntry { sha256: hex_digest(&bytes), bytes: bytes.len() as u64, name })
        })
        .collect::<Result<Vec<_>>>()?;
    let manifest = Manifest { files };
    write_json(&dir.join("manifest.json"), &manifest)?;
    Ok(manifest)
}

pub fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// [`pipeline`] followed by [`write_pipeline`].
pub fn run_pipeline(g: &BipartiteGraph, config: &GridConfig, dir: &Path) -> Result<Manifest> {
    let output = pipeline(g, config)?;
    write_pipeline(g, &output, dir)
}
