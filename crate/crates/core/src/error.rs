use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch in {op}: {details}")]
    ShapeMismatch { op: &'static str, details: String },

    #[error("matrix is not square: {rows} x {cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("negative edge weight {value} at ({row}, {col})")]
    NegativeWeight { row: usize, col: usize, value: f64 },

    #[error("adjacency is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },

    #[error("unexpected self-loop stored at node {0}")]
    SelfLoop(usize),

    #[error("labels are not contiguous class ids 0..k-1")]
    BadLabels,

    #[error("index {index} out of range (bound {bound})")]
    IndexOutOfRange { index: usize, bound: usize },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("invalid model spec: {0}")]
    InvalidModelSpec(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("split infeasible: {0}")]
    SplitInfeasible(String),

    #[error("dense decoder refused: n = {n} exceeds node cap {cap}")]
    DecoderTooLarge { n: usize, cap: usize },

    #[error("training diverged: non-finite loss at epoch {epoch}")]
    DivergedLoss { epoch: usize },

    #[error("non-finite gradient in parameter block {index}")]
    NonFiniteGradient { index: usize },

    #[error("graph has no labels; clustering evaluation needs ground truth")]
    MissingLabels,

    #[error("parse error at {path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("loaded graph is empty: {0}")]
    EmptyGraph(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
