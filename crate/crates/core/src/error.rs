use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("modulus {0} is not prime")]
    CompositeModulus(u64),
    #[error("modulus must be at least 2, got {0}")]
    ModulusTooSmall(u64),
    #[error("operation requires an odd prime, got p = {0}")]
    EvenModulus(u64),
    #[error("order must be a positive integer")]
    ZeroOrder,
    #[error("order {k} does not divide p - 1 = {p_minus_one}")]
    OrderDoesNotDivide { k: u64, p_minus_one: u64 },
    #[error("work estimate {needed} exceeds the budget of {budget} elementary terms")]
    BudgetExceeded { needed: u128, budget: u64 },
    #[error("work estimate {needed} exceeds the budget of {budget} for d = {d} variables")]
    DimensionBudget { d: usize, needed: u128, budget: u64 },
    #[error("functions live over different fields (p = {left} and p = {right})")]
    ContextMismatch { left: u64, right: u64 },
    #[error("expected {expected} values, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("value at {index} has modulus {modulus} > 1")]
    NotBounded { index: usize, modulus: f64 },
    #[error("invalid exponent {0}; norms need s >= 1")]
    InvalidExponent(f64),
    #[error("Gowers degree {0} is not supported here")]
    InvalidDegree(u32),
    #[error("index {index} out of range 0..{len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("invalid linear system: {0}")]
    InvalidSystem(String),
    #[error("configuration violates the degree condition; witness combination {witness:?}")]
    InvalidSpec { witness: Vec<i64> },
    #[error("phase coefficient must be nonzero")]
    ZeroPhase,
    #[error("the character of order 1 is principal")]
    PrincipalCharacter,
    #[error("no point b_i differs from all the others")]
    DegenerateConfiguration,
    #[error("parse error at offset {offset}: expected {expected}")]
    Parse { offset: usize, expected: String },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("i/o failure: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}
