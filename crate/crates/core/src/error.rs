use thiserror::Error;

/// Every failure mode of the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MlError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("no convergence: {0}")]
    NonConvergence(String),
    #[error("cancellation loss: partial sums exceed the result by a factor {ratio:.3e}")]
    CancellationLoss { ratio: f64 },
    #[error("argument lies within the exclusion band around a critical ray")]
    RayProximity,
    #[error("precondition violated: {0}")]
    PreconditionViolation(String),
    #[error("denominator {value:.3e} is indistinguishable from zero")]
    NearZeroDenominator { value: f64 },
    #[error("overflow: {0}")]
    Overflow(String),
    #[error("series diverges in double precision: {0}")]
    SeriesDivergence(String),
    #[error("pole at {0}")]
    Pole(String),
    #[error("unknown identity '{0}'")]
    UnknownIdentity(String),
}

pub type Result<T> = std::result::Result<T, MlError>;

pub(crate) fn domain(msg: impl Into<String>) -> MlError {
    MlError::Domain(msg.into())
}

pub(crate) fn precondition(msg: impl Into<String>) -> MlError {
    MlError::PreconditionViolation(msg.into())
}
