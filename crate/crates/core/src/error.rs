use thiserror::Error;

/// Errors raised by the group, ramification and cover computations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{what} exceeded the cap of {cap}")]
    CapExceeded { what: &'static str, cap: usize },
    #[error("matrix is not invertible modulo {modulus}")]
    NotInvertible { modulus: u64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("level {level} out of range 0..={max}")]
    LevelOutOfRange { level: u32, max: u32 },
    #[error("not a subgroup: {0}")]
    NotASubgroup(String),
    #[error("not normal: {0}")]
    NotNormal(String),
    #[error("invalid filtration: {0}")]
    InvalidFiltration(String),
    #[error("non-integral value in {0}")]
    NonIntegral(String),
    #[error("non-integral genus (2g - 2 = {euler}) for subgroup of index {degree}")]
    NonIntegralGenus { euler: i64, degree: u64 },
    #[error("non-integral different at puncture {puncture}")]
    NonIntegralDifferent { puncture: usize },
    #[error("matrix logarithm outside its convergence domain")]
    OutsideDomain,
    #[error("wild inertia mismatch: {0}")]
    WildMismatch(String),
    #[error("assumption violated: {0}")]
    AssumptionViolated(String),
    #[error("identity violated: {0}")]
    IdentityViolation(String),
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("subgroup of order {order} could not be classified")]
    Unclassifiable { order: usize },
    #[error("character is not multiplicative: {0}")]
    BadCharacter(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("validation failed: {}", .0.iter().map(|e| format!("{}: {}", e.path, e.message)).collect::<Vec<_>>().join("; "))]
    Validation(Vec<FieldError>),
    #[error("io: {0}")]
    Io(String),
}

/// A validation failure attached to a path inside a spec document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldError {
    pub path: String,
    pub message: String,
}

pub type Result<T> = std::result::Result<T, Error>;
