use thiserror::Error;

/// Errors raised by the numerical modules.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite sample at {context}")]
    NonFinite { context: String },

    #[error("gauge construction failed: {0}")]
    Gauge(String),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("estimator failed: {0}")]
    Estimator(String),

    #[error("discretization failed at node {node} (r = {radius}): potential is not finite")]
    Discretization { node: usize, radius: f64 },

    #[error("window ({lower}, {upper}) holds {count} eigenvalues, refusing (limit {limit})")]
    PathologicalWindow {
        lower: f64,
        upper: f64,
        count: usize,
        limit: usize,
    },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("test state rejected: {0}")]
    StateRejected(String),
}

pub type Result<T> = std::result::Result<T, Error>;
