use thiserror::Error;

/// Errors produced anywhere in the toolchain.
///
/// Variants are split into input/validation problems (bad files, bad
/// dimensions, non-unitary operators) and internal invariant violations, so
/// front-ends can map them onto distinct exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("matrix is not unitary (max |M^dag M - I| = {residual:.3e})")]
    NotUnitary { residual: f64 },

    #[error("dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("integer coefficient overflow in exact ring arithmetic")]
    Overflow,

    #[error("invalid gate symbol {0:?}")]
    InvalidSymbol(char),

    #[error("index out of range: {index} not in 1..={dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("{0}")]
    Invalid(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("empty table")]
    EmptyTable,

    #[error("decomposition failed: reconstruction residue {residual:.3e}")]
    DecompositionFailed { residual: f64 },

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by the caller's input rather than a broken
    /// internal invariant.
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            Error::Internal(_) | Error::DecompositionFailed { .. } | Error::Overflow
        )
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
