use std::io;

use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("y upper bound {value} at index {index} is not strictly positive")]
    NonPositiveBound { index: usize, value: f64 },

    #[error("dimension mismatch for {what}: expected {expected}, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("node set is not a vertex cover: edge ({0}, {1}) is uncovered")]
    NotACover(usize, usize),

    #[error("infeasible cover partition: {0}")]
    InfeasiblePartition(String),

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("numerical breakdown in simplex: {0}")]
    NumericalBreakdown(String),

    #[error("simplex iteration limit of {0} reached")]
    IterationLimit(usize),

    #[error("LP relaxation is unbounded")]
    UnboundedRelaxation,

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
