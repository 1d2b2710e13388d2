//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors raised by contract violations and refused computations.
///
/// Verdicts (axiom failures, falsified inequalities, failed diagnostics) are
/// not errors; they are reported as data.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite value in {what}")]
    NonFinite { what: &'static str },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid space: {0}")]
    InvalidSpace(String),

    #[error("invalid mapping: {0}")]
    InvalidMapping(String),

    #[error("the enriched inequality is only defined for u != v")]
    EqualPoints,

    #[error("variant mismatch: operation requires variant {expected}, spec has {found}")]
    VariantMismatch {
        expected: crate::comparison::Variant,
        found: crate::comparison::Variant,
    },

    #[error("unknown name `{0}`")]
    Unknown(String),

    #[error("refused: contraction factor k = {k} is not below 1")]
    InvalidCertificate { k: f64 },

    #[error("iterate overflowed at step {iteration} (|coordinate| > 1e100 or non-finite)")]
    Overflow { iteration: usize },

    #[error("point is not a certified fixed point (residual {residual:e})")]
    NotCertified { residual: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
