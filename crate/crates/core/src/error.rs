use thiserror::Error;

/// Errors reported by the estimation, bootstrap, and parametric routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("alpha level must lie strictly inside (0, 1), got {0}")]
    InvalidAlpha(f64),
    #[error("invalid sample: {0}")]
    InvalidSample(String),
    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
    #[error("bracket search did not enclose a sign change after {0} expansions")]
    BracketingFailure(usize),
    #[error("samples have mismatched lengths: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("tangent function is not absolutely integrable: {0}")]
    NonIntegrable(String),
    #[error("max_lag {max_lag} must be smaller than the series length {n}")]
    LagTooLarge { max_lag: usize, n: usize },
    #[error("block length {block} must be a divisor of n = {n} and smaller than n")]
    InvalidBlockLength { block: usize, n: usize },
    #[error("weight draws degenerated to zero mean {0} times in a row")]
    DegenerateDraw(usize),
    #[error("need at least {min} bootstrap replicates, got {got}")]
    TooFewReplicates { min: usize, got: usize },
    #[error("variance must be strictly positive, got {0}")]
    ZeroVariance(f64),
    #[error("k = {k} outside the admissible range 1..={max} for n = {n}")]
    KTooLarge { k: usize, max: usize, n: usize },
    #[error("argument outside the domain: {0}")]
    DomainError(String),
    #[error("generator produces a degenerate limit law: {0}")]
    DegenerateGenerator(String),
}

pub type Result<T> = std::result::Result<T, Error>;
