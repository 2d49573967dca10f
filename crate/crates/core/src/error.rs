use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("unknown edge {0}")]
    UnknownEdge(usize),
    #[error("unknown vertex {0}")]
    UnknownVertex(usize),
    #[error("genus {0} is too small for a stable or canonical model")]
    GenusTooSmall(usize),
    #[error("invalid point: {0}")]
    InvalidPoint(String),
    #[error("divisor is not effective")]
    NotEffective,
    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: i64, found: i64 },
    #[error("reduction did not finish within {0} steps")]
    StepGuard(u64),
    #[error("malformed morphism: {0}")]
    Structural(String),
    #[error("morphism is not harmonic")]
    NotHarmonic,
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("construction check failed: {0}")]
    Construction(String),
    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
