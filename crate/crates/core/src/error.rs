use thiserror::Error;

/// Errors raised by the library.
///
/// Variants are grouped by how the command-line front end reports them:
/// malformed input, geometric degeneracy, or a failed verification.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not symmetric (asymmetry {0:.3e})")]
    NotSymmetric(f64),
    #[error("columns are linearly dependent (Gram determinant {0:.3e})")]
    DependentColumns(f64),
    #[error("matrix is not positive definite")]
    NotSpd,
    #[error("matrix is singular")]
    Singular,
    #[error("type values are not strictly decreasing")]
    NotDecreasing,
    #[error("bad multiplicities: {0}")]
    BadMultiplicities(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("Gram system is singular")]
    SingularGram,
    #[error("flag signatures are not compatible: {0}")]
    SignatureMismatch(String),
    #[error("matrix does not have determinant one (det = {0})")]
    NotUnimodular(f64),
    #[error("flags are not opposite")]
    NotOpposite,
    #[error("type mismatch: {0}")]
    TypeMismatch(String),
    #[error("boundary points are not opposite; the Gromov product diverges")]
    NonOpposite,
    #[error("calibration failed: residual {0:.3e}")]
    CalibrationFailed(f64),
    #[error("quadruple is outside the domain of definition")]
    Inadmissible,
    #[error("isometry is not regular hyperbolic: {0}")]
    NotRegular(String),
    #[error("flag is not opposite to both fixed flags")]
    NotGeneric,
    #[error("basepoint does not lie in the flat (residual {0:.3e})")]
    BasepointNotInFlat(f64),
    #[error("boundary points coincide")]
    CoincidentPoints,
    #[error("degenerate configuration: {0}")]
    Degenerate(String),
    #[error("ends coincide: {0}")]
    SameEnd(String),
    #[error("map does not preserve cross ratios (max deviation {0:.3e})")]
    NotMoebius(f64),
    #[error("medians do not assemble into an isometry: {0}")]
    NotExtendable(String),
    #[error("arity mismatch: {0}")]
    ArityMismatch(String),
    #[error("factor split is ambiguous: {0}")]
    Ambiguous(String),
    #[error("factor split is inconsistent: {0}")]
    Inconsistent(String),
    #[error("sample cannot separate the merged points: {0}")]
    CannotSeparate(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    /// Exit status used by the `xr` binary: 1 for bad input, 2 for
    /// geometric degeneracy, 3 for failed verification.
    pub fn exit_code(&self) -> i32 {
        use Error::*;
        match self {
            NotOpposite
            | NonOpposite
            | Inadmissible
            | NotRegular(_)
            | NotGeneric
            | BasepointNotInFlat(_)
            | CoincidentPoints
            | Degenerate(_)
            | SameEnd(_)
            | CannotSeparate(_) => 2,
            CalibrationFailed(_) | NotMoebius(_) | NotExtendable(_) | Ambiguous(_) | Inconsistent(_) => 3,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
