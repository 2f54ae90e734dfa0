use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid chain: {0}")]
    InvalidChain(String),

    #[error("chain `{0}` carries no labels")]
    MissingLabels(&'static str),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: String, got: String },

    #[error("discount factor {0} outside [1e-6, 1 - 1e-6]")]
    InvalidGamma(f64),

    #[error("invalid cost: {0}")]
    InvalidCost(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("linear solve residual {residual:.3e} exceeds {limit:.1e}")]
    LinearSolve { residual: f64, limit: f64 },

    #[error("fixed-point iteration hit cap of {cap} sweeps (residual {residual:.3e})")]
    IterationCap { cap: usize, residual: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
