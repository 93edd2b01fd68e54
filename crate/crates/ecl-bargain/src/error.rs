use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("direction must be nonzero")]
    ZeroDirection,
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("no strict improvement over the disagreement point exists")]
    NoStrictImprovement,
    #[error("conditioning on a zero-probability event: {0}")]
    ZeroProbability(String),
    #[error("point lies outside the set")]
    OutsideSet,
    #[error("point is not on the frontier")]
    NotOnFrontier,
    #[error("point is not Pareto optimal")]
    NotParetoOptimal,
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("linear program failed: {0}")]
    Lp(String),
    #[error("solver did not converge: {0}")]
    NonConvergence(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
