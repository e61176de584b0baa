use thiserror::Error;

/// Errors produced by the latic toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("modulus {0} is not prime")]
    NotPrime(u64),

    #[error("codebook has {found} words, target was {target}")]
    CodebookTooSmall { found: usize, target: usize },

    #[error("cross gain h{row}{col} is zero")]
    ZeroGain { row: usize, col: usize },

    #[error("direct gain h{0}{0} is not 1")]
    NonUnitDiagonal(usize),

    #[error("channel matrix has no rational witness for the cross-gain ratio product")]
    MissingWitness,

    #[error("alignment residual {residual:e} exceeds tolerance {tolerance:e}")]
    AlignmentResidual { residual: f64, tolerance: f64 },

    #[error("layered allocation failed at stage {stage} for user {user}: power {power}")]
    NonPositivePower { stage: usize, user: usize, power: f64 },

    #[error("configuration rejected: {0}")]
    Precondition(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }

    /// Whether the error stems from bad user input rather than a failure
    /// while computing.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter { .. }
                | Error::DimensionMismatch { .. }
                | Error::NotPrime(_)
                | Error::ZeroGain { .. }
                | Error::NonUnitDiagonal(_)
                | Error::MissingWitness
                | Error::Precondition(_)
                | Error::Json(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
