use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("shape mismatch: {0}")]
    InvalidShape(String),

    #[error("rank {rank} exceeds the supported maximum of 2")]
    RankTooHigh { rank: usize },

    #[error("pencil hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),
}

impl Error {
    /// Errors caused by the caller's data rather than by the computation.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidDimension(_)
                | Error::InvalidInput(_)
                | Error::InvalidShape(_)
                | Error::RankTooHigh { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
