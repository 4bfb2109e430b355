use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("dimension {dim} exceeds configured maximum {max} (set UPQP_MAX_DIM to raise it)")]
    DimensionLimit { dim: usize, max: usize },

    #[error("matrix entries contain NaN or infinity")]
    NonFinite,

    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not unitary (deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("Kraus operators are not trace preserving (deviation {deviation:.3e})")]
    NotTracePreserving { deviation: f64 },

    #[error("input is not a density matrix: {reason}")]
    NotState { reason: String },

    #[error("operator norm {norm:.12} exceeds 1")]
    NotContraction { norm: f64 },

    #[error("map is not injective: rank {rank} < {needed}")]
    NonInjective { rank: usize, needed: usize },

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("semidefinite solver failed: {0}")]
    Solver(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
