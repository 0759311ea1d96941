use thiserror::Error;

/// Errors raised by field construction, number theory, simulation and solvers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("modulus polynomial is reducible over Z_{p}")]
    ReducibleModulus { p: u64 },
    #[error("invalid modulus polynomial: {0}")]
    InvalidModulus(String),
    #[error("invalid field element: {0}")]
    InvalidElement(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("quadratic character is undefined in characteristic 2")]
    EvenCharacteristic,
    #[error("trace matrix is singular; field specification is inconsistent")]
    SingularTraceMatrix,
    #[error("Jacobi symbol needs an odd modulus, got {0}")]
    EvenModulus(u64),
    #[error("{0} is even")]
    EvenInput(u64),
    #[error("{0} is not square-free")]
    NotSquareFree(u64),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("unsupported parameters: {0}")]
    UnsupportedParameters(String),
    #[error("domain of size {size} exceeds the limit {limit}")]
    DomainTooLarge { size: u64, limit: u64 },
    #[error("phase at index {index} is not a unit")]
    NonUnitPhase { index: usize },
    #[error("basis map is not a bijection")]
    NotBijective,
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("shift is outside the oracle domain")]
    ShiftOutOfRange,
    #[error("modulus {n} violates n^2 < M for M = {m}")]
    ModulusTooLargeForM { n: u64, m: u64 },
    #[error("domain violation: {0}")]
    DomainViolation(String),
    #[error("no verified answer after {attempts} attempts")]
    RetriesExhausted { attempts: u32 },
    #[error("no convergent with a usable denominator")]
    NoValidConvergent,
    #[error("oracle variant mismatch: {0}")]
    VariantMismatch(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
