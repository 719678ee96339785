//! Error type shared by all modules.

use alloc::string::String;

/// Errors reported by the operator-model routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Input matrices or operators have incompatible shapes.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A requested object would exceed the supported dense-matrix scale.
    #[error("dimension too large: {0}")]
    DimensionTooLarge(String),

    /// A weight block is numerically singular.
    #[error("weight block at level {level} is numerically singular (sigma_min/sigma_max = {ratio:e})")]
    SingularWeight { level: usize, ratio: f64 },

    /// A matrix required to be Hermitian is not.
    #[error("matrix not Hermitian: {0}")]
    NotHermitian(String),

    /// A matrix required to be positive definite is not.
    #[error("matrix not positive definite: {0}")]
    NotPositiveDefinite(String),

    /// A weight rule cannot produce the requested level.
    #[error("level {level} out of range: {reason}")]
    LevelOutOfRange { level: usize, reason: String },

    /// The truncation level is too small for the requested computation.
    #[error("truncation level too small: {0}")]
    TruncationTooSmall(String),

    /// A letter index is outside `1..=d`.
    #[error("letter {letter} out of range for alphabet size {d}")]
    LetterOutOfRange { letter: u8, d: usize },

    /// A weight specification is malformed.
    #[error("invalid weight spec: {0}")]
    InvalidSpec(String),

    /// Algebra generation did not reach a stable dimension.
    #[error("algebra dimension did not stabilize within {0} closure passes")]
    DimensionNotStabilized(usize),

    /// The algebra does not contain the ambient identity.
    #[error("algebra does not contain the identity")]
    MissingIdentity,

    /// No random central element separated the summands.
    #[error("central element failed to separate summands after {0} seeded draws")]
    CenterSplitFailed(usize),

    /// The ideal lattice would have more than 2^20 masks.
    #[error("ideal lattice too large: {summands} summands")]
    LatticeTooLarge { summands: usize },

    /// An element lies outside the span it must belong to.
    #[error("element outside the modeled span (residual {residual:e}, tolerance {tol:e})")]
    OutsideSpan { residual: f64, tol: f64 },

    /// The input is valid but outside the scope of the decision procedure.
    #[error("out of scope: {0}")]
    OutOfScope(String),

    /// An internal consistency check failed beyond tolerance.
    #[error("numerical check failed: {0}")]
    NumericalCheckFailed(String),
}

pub type Result<T> = core::result::Result<T, Error>;
