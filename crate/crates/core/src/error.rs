use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {what} (expected {expected}, got {got})")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("rank-{rank} truncation misses the entrywise budget: max error {achieved:.3e} > {budget:.3e}")]
    RankCheckFailed {
        rank: usize,
        achieved: f64,
        budget: f64,
    },

    #[error("dense matrix of size {rows}x{cols} exceeds cap {cap}")]
    SizeCapExceeded { rows: usize, cols: usize, cap: usize },

    #[error("singular value decomposition unavailable: {0}")]
    SvdUnavailable(String),

    #[error("function does not satisfy protocol precondition: {0}")]
    Precondition(String),

    #[error("convex decomposition failed at grid cell {cell}: {reason}")]
    NotConvexLipschitz { cell: usize, reason: String },

    #[error("lambda floor violated at t={t}: lambda_t={lambda:.6e} < {floor:.6e}")]
    LambdaFloorViolated { t: usize, lambda: f64, floor: f64 },

    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
