use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("invalid metric: {0}")]
    InvalidMetric(String),

    #[error("invalid structure constants: {0}")]
    InvalidStructureConstants(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("subspace is not self-saturated: pair ({0}, {1}) violates closure")]
    NotSelfSaturated(usize, usize),

    #[error("subspace is not closed under the diamond product: pair ({0}, {1})")]
    NotDiamondClosed(usize, usize),

    #[error("subspace does not contain the constant vector")]
    MissingConstant,

    #[error("subspace is not contained in the zero-sum hyperplane")]
    NotZeroSum,

    #[error("degenerate factor restriction (rank {rank}, expected {expected})")]
    DegenerateFactor { rank: usize, expected: usize },

    #[error("no sign change on bracket [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
