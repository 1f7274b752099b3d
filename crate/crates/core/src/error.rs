use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Failure modes of [`crate::optimizer::solve_lp`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpError {
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("simplex stopped after {0} pivots")]
    IterationLimit(usize),
    #[error("malformed linear program: {0}")]
    Malformed(String),
    #[error("solution failed the substitution check: {0}")]
    Certificate(String),
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid probability vector: {0}")]
    InvalidDistribution(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("type intensity is undefined for this hypothesis set")]
    KappaUndefined,
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("iteration did not reach residual {tolerance:e} within {sweeps} sweeps")]
    NoConvergence { sweeps: usize, tolerance: f64 },
    #[error("contraction violated at sweep {sweep}: residual {residual:e} > gamma * {previous:e}")]
    Contraction {
        sweep: usize,
        residual: f64,
        previous: f64,
    },
    #[error("unknown type `{0}`")]
    UnknownType(String),
    #[error("envelope violated: {0}")]
    Envelope(String),
    #[error("ingest: {0}")]
    Ingest(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
