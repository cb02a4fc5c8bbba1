//! Error types shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Operand shapes are incompatible for the requested operation.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A value is outside the domain an operation accepts.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The requested operation is only defined for specific graphs.
    #[error("unsupported graph: {0}")]
    UnsupportedGraph(String),

    /// Exhaustive pattern enumeration would exceed the configured cap.
    #[error(
        "pattern enumeration of {total} patterns exceeds the cap of {cap}; \
         use sample_patterns (CLI: a sampling run) instead"
    )]
    PatternCapExceeded { total: u128, cap: usize },

    /// The surviving signal is numerically indistinguishable from zero.
    #[error("signal extinction ({context}): remaining trace {trace:.3e} is below 1e-15")]
    SignalExtinction { context: String, trace: f64 },

    /// Two distributions are defined over different vertex sets.
    #[error("mismatched supports: {0}")]
    MismatchedSupports(String),

    /// The run configuration failed to parse or validate.
    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code the CLI maps this error to.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::PatternCapExceeded { .. } => 3,
            _ => 1,
        }
    }
}
