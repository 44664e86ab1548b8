use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid matrix shape: {0}")]
    InvalidShape(String),
    #[error("column {0} has zero norm")]
    ZeroColumn(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("group size {r} does not divide column count {p}")]
    IndivisibleGroupSize { r: usize, p: usize },
    #[error("matrix has no group partition (or only one group)")]
    NoGroups,
    #[error("average coherence needs at least two columns")]
    SingleColumn,
    #[error("galois ring elements of different degree ({0} vs {1})")]
    MixedDegree(usize, usize),
    #[error("invalid specification: {0}")]
    InvalidSpec(String),
    #[error("construction check failed: {0}")]
    ConstructionCheck(String),
    #[error("theta {theta} outside 1..={max}")]
    ThetaOutOfRange { theta: usize, max: usize },
    #[error("sparsity {k} outside the admissible range 0..={max}")]
    BadK { k: usize, max: usize },
    #[error("signal has no nonzero entries")]
    EmptySupport,
    #[error("probe vector has zero norm")]
    ZeroZ,
    #[error("invalid index set: {0}")]
    InvalidSupport(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("incomplete report: {0}")]
    IncompleteReport(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for failures caused by the file system rather than by input validation.
    pub fn is_io(&self) -> bool {
        match self {
            Error::Io(_) => true,
            Error::Csv(e) => matches!(e.kind(), csv::ErrorKind::Io(_)),
            _ => false,
        }
    }
}
