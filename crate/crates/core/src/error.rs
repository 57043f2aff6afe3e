use thiserror::Error;

/// Errors raised by the lattice computations.
#[derive(Debug, Error)]
pub enum LatticeError {
    #[error("invalid specification: {0}")]
    InvalidSpec(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("argument {t} lies beyond the tabulated range [0, {max}]")]
    DomainOverflow { t: f64, max: f64 },
    #[error("value {y} lies outside the representable range of the function")]
    RangeOverflow { y: f64 },
    #[error("conjugate diverges at u = {u}: supremum exceeds the cap")]
    Divergent { u: f64 },
    #[error("host not supported by this operation: {0}")]
    UnsupportedHost(String),
    #[error("couple not supported: {0}")]
    UnsupportedCouple(String),
    #[error("vector length {n} exceeds the dimension cap {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error("Orlicz function fails the doubling condition: estimated constant {k} exceeds cap {cap}")]
    Delta2Violation { k: f64, cap: f64 },
    #[error("reference element has zero K-functional")]
    ZeroDenominator,
    #[error("majorization fails at partial sum k = {k}")]
    MajorizationFailure { k: usize },
    #[error("disjoint family invalid: {0}")]
    InvalidFamily(String),
    #[error("unknown check id: {0}")]
    UnknownCheck(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, LatticeError>;
