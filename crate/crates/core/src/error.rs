use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {reason}")]
    MalformedRow { line: usize, reason: String },

    #[error("empty graph")]
    EmptyGraph,

    #[error("node `{0}` appears in both the left and right columns")]
    SideCollision(String),

    #[error("invalid edge ({a}, {b}): {reason}")]
    InvalidEdge { a: usize, b: usize, reason: &'static str },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("target disassortativity {target} not reached after {steps} rewiring steps: achieved {achieved:.4}")]
    UnreachableCorrelation { target: f64, achieved: f64, steps: u64 },

    #[error("stationary distribution did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("undefined similarity")]
    UndefinedSimilarity,

    #[error("undefined correlation")]
    UndefinedCorrelation,

    #[error("centralization undefined for graphs with {0} nodes")]
    CentralizationUndefined(usize),

    #[error("graphs are defined over different node universes")]
    NodeUniverseMismatch,

    #[error("cell {cell}: {source}")]
    Cell { cell: String, source: Box<Error> },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
