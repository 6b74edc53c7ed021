use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("sequence must have at least one entry")]
    EmptySequence,
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("ground set size {0} outside 1..=24")]
    GroundSetSize(u32),
    #[error("expected {expected} subset values, got {actual}")]
    SubsetTableSize { expected: usize, actual: usize },
    #[error("triangle must be in {0} orientation")]
    WrongOrientation(&'static str),
    #[error("invalid urn parameters: {0}")]
    InvalidUrn(String),
    #[error("invalid index set: {0}")]
    InvalidIndexSet(String),
    #[error("enumeration too large")]
    EnumerationTooLarge,
    #[error("series does not terminate")]
    NonTerminating,
    #[error("lower parameter pole")]
    LowerPole,
    #[error("pole")]
    Pole,
    #[error("order too large: {order} exceeds {max}")]
    OrderTooLarge { order: usize, max: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("io error: {0}")]
    Io(String),
}
