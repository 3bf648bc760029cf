use thiserror::Error;

/// Errors raised by the numerical routines and the harness.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("point is not in the open unit ball (|z| = {norm})")]
    OutsideBall { norm: f64 },

    #[error("point is not inside the real ball (|x - a| = {distance}, r = {radius})")]
    OutsideRealBall { distance: f64, radius: f64 },

    #[error("degenerate sphere point: zero vector cannot be normalized")]
    ZeroVector,

    #[error("projection onto the complex line through a is undefined for a = 0")]
    UndefinedProjection,

    #[error("near-singular kernel evaluation: {0}")]
    NearSingular(String),

    #[error("evaluation failed at quadrature node {index}: {source}")]
    AtNode { index: usize, source: Box<Error> },

    #[error("finite-difference step {step} too large at |z| = {norm}")]
    StepTooLarge { step: f64, norm: f64 },

    #[error("degenerate pair: z = w")]
    DegeneratePair,

    #[error("empty sample set")]
    EmptySamples,

    #[error("boundary bound violated: |psi| = {value} > M = {bound} at a sampled node")]
    BoundViolated { value: f64, bound: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
