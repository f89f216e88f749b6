use thiserror::Error;

/// Errors raised by the simulators and calculators in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("cannot normalize the zero vector")]
    ZeroVector,
    #[error("non-finite amplitude at index {0}")]
    NonFinite(usize),
    #[error("bad dimension {0}: expected a power of two >= 2")]
    BadDimension(usize),
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("promise violated: {0}")]
    PromiseViolation(String),
    #[error("bad arity {0}: expected a positive multiple of 4")]
    BadArity(usize),
    #[error("bad repetition count {0}: expected an odd positive integer")]
    BadRepetitionCount(usize),
    #[error("graph has no edges")]
    EmptyGraph,
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("vertices {s} and {t} are not connected")]
    Disconnected { s: usize, t: usize },
    #[error("source and sink are the same vertex {0}")]
    SameVertex(usize),
    #[error("graph has boundary edges")]
    BoundaryPresent,
    #[error("vertex {0} has no incident edges")]
    IsolatedVertex(usize),
    #[error("graph is not bipartite")]
    NotBipartite,
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("invalid cost profile: {0}")]
    InvalidProfile(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
