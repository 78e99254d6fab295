use thiserror::Error;

/// Errors raised by the laboratory engines.
///
/// The variants line up with the process exit codes of the `dirlaw` binary:
/// domain/unsupported/singular inputs are usage errors, `Resource` marks a
/// tripped cost or memory guard, and `Integrity` means an internal
/// cross-check disagreed.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("singular evaluation: {0}")]
    Singular(String),

    #[error("resource guard exceeded: {0}")]
    Resource(String),

    #[error("integrity check failed: {0}")]
    Integrity(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

macro_rules! ensure {
    ($cond:expr, $variant:ident, $($fmt:tt)+) => {
        if !($cond) {
            return Err($crate::error::Error::$variant(format!($($fmt)+)));
        }
    };
}
pub(crate) use ensure;
