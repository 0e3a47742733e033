use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by samplers, oracles, numerics and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("index ({i}, {j}) out of range for dimension {n}")]
    IndexOutOfRange { i: usize, j: usize, n: usize },

    #[error("covariance not positive definite (pivot {pivot} is {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("matrix is not symmetric: |a({i},{j}) - a({j},{i})| = {gap:e}")]
    NotSymmetric { i: usize, j: usize, gap: f64 },

    #[error("eigensolver failed to converge for eigenvalue {index} after {iterations} iterations")]
    NoConvergence { index: usize, iterations: usize },

    #[error("integer overflow: {0}")]
    Overflow(String),

    #[error("instance too large for exhaustive evaluation: {0}")]
    OversizedInstance(String),

    #[error("tuples share no common vertex")]
    NoCommonVertex,

    #[error("variance undefined for fewer than two replicas")]
    VarianceUndefined,

    #[error("replica {replica} (seed {seed:#018x}) failed: {source}")]
    ReplicaFailed {
        replica: usize,
        seed: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("schema mismatch in {path}: {detail}")]
    Schema { path: PathBuf, detail: String },

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of the numerical machinery (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::NotPositiveDefinite { .. } | Error::NotSymmetric { .. } | Error::NoConvergence { .. } => true,
            Error::ReplicaFailed { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
