use thiserror::Error;

/// Errors surfaced by fallible operations across the crate.
///
/// Arithmetic on mismatched levels or truncations is a programming error and
/// panics instead; these variants cover conditions a caller can trigger with
/// otherwise well-formed input.
#[derive(Debug, Error)]
pub enum Error {
    #[error("level must be at least {min}, got {got}")]
    BadLevel { min: u32, got: u32 },
    #[error("cannot invert zero in Q(zeta_{0})")]
    ZeroInverse(u32),
    #[error("exponent {k} is not invertible mod {n}")]
    NotCoprime { k: u32, n: u32 },
    #[error("invalid block-sum parameters: {0}")]
    BadBlockParams(String),
    #[error("divisor-sum depth {0} not supported (max 2 for series assembly)")]
    DepthUnsupported(usize),
    #[error("divisor-sum depth must be positive")]
    DepthZero,
    #[error("series order {0} out of range for this operation")]
    BadOrder(u32),
    #[error("{0} is not a proper divisor of the level")]
    NotProperDivisor(u64),
    #[error("free value supplied for pivot column {0}")]
    FreeValueOnPivot(String),
    #[error("assignment does not satisfy the linear system: first failure at {0}")]
    AssignmentUnsatisfied(String),
    #[error("unknown assignment name {0:?}")]
    UnknownAssignment(String),
    #[error("numeric precondition violated: {0}")]
    NumericDomain(String),
    #[error("polynomial input invalid: {0}")]
    BadPolynomial(String),
    #[error("usage error: {0}")]
    Usage(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
