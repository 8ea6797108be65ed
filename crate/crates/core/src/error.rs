use thiserror::Error;

use crate::ring::RingDescriptor;

/// Errors raised by structural misuse or rejected constructions.
///
/// Verification failures are never reported through this type; they come
/// back as `Refuted` reports carrying a witness.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("ring mismatch: {left} vs {right}")]
    RingMismatch {
        left: RingDescriptor,
        right: RingDescriptor,
    },

    #[error("modulus must be at least 2, got {0}")]
    InvalidModulus(u64),

    #[error("truncation order mismatch: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },

    #[error("truncation order must be positive")]
    ZeroOrder,

    #[error("cannot parse {what}: {input:?}")]
    Parse { what: &'static str, input: String },

    #[error("value {value} is not representable in {ring}")]
    NotRepresentable { value: String, ring: RingDescriptor },

    #[error("the zero polynomial has an infinite root set")]
    InfiniteRootSet,

    #[error("operation requires coefficients in Q or Z, got {0}")]
    UnsupportedRing(RingDescriptor),

    #[error("endomorphism is not invertible: {0}")]
    NotInvertible(String),

    #[error("quotient relation violated: {0}")]
    QuotientRelation(String),

    #[error("derivation check failed: {0}")]
    DerivationCheck(String),

    #[error("hypothesis check failed: {0}")]
    Hypothesis(String),

    #[error("support violation: q[{i}][{j}] must vanish")]
    SupportViolation { i: usize, j: usize },

    #[error("constant term {0} of the degree-one column is not nilpotent; no continuous algebra map exists")]
    NonNilpotentConstant(String),

    #[error("column zero must vanish, found a[{i}][0] = {value}")]
    NonzeroColumnZero { i: usize, value: String },

    #[error("table cell (j={j}, m={m}) is not populated; extend first")]
    ExtendFirst { j: usize, m: usize },

    #[error("extension is not well founded at (j={j}, m={m})")]
    NotWellFounded { j: usize, m: usize },

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("internal mismatch between independent computations: {0}")]
    InternalMismatch(String),

    #[error("{path}: {message}")]
    Schema { path: String, message: String },

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
