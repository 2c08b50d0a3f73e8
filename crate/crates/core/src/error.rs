use thiserror::Error;

/// Errors raised by state construction, operator algebra and protocol execution.
#[derive(Debug, Error)]
pub enum Error {
    #[error("duplicate slot label {0}")]
    DuplicateSlot(String),
    #[error("unknown slot label {0}")]
    UnknownSlot(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("layout mismatch: {0}")]
    LayoutMismatch(String),
    #[error("empty keep set for partial trace")]
    EmptyKeep,
    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPsd(f64),
    #[error("trace is not one (got {0})")]
    NotUnitTrace(f64),
    #[error("measurement is incomplete (completeness residual {0:.3e})")]
    IncompleteMeasurement(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("state set parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("candidates must be product states with per-party factors")]
    NonProductCandidate,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
