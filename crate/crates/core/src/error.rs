use thiserror::Error;

use crate::exact::Family;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("variable family mismatch: {left:?} vs {right:?}")]
    FamilyMismatch { left: Family, right: Family },

    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("negative exponent {exponent} not allowed in family {family:?}")]
    NegativeExponent { family: Family, exponent: i64 },

    #[error("variable index {index} out of range for arity {arity}")]
    IndexOutOfRange { index: usize, arity: usize },

    #[error("pole: coordinate {index} is zero but carries exponent {exponent}")]
    Pole { index: usize, exponent: i64 },

    #[error("cannot parse exact rational from {0:?}")]
    ParseScalar(String),

    #[error("operator lives in the {found} space, expected {expected}")]
    SpaceMismatch { expected: &'static str, found: &'static str },

    #[error("dimension {d} exceeds the supported bound {max}")]
    DimensionTooLarge { d: usize, max: usize },

    #[error("invalid basis ordering: {0}")]
    InvalidOrdering(String),

    #[error("insufficient truncation: have {have}, need {need}")]
    InsufficientTruncation { have: i64, need: i64 },

    #[error("series is not homogeneous of degree {expected} in b")]
    NotHomogeneousInB { expected: u32 },

    #[error("unsupported derivative order {p}: {reason}")]
    UnsupportedOrder { p: u32, reason: &'static str },

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
