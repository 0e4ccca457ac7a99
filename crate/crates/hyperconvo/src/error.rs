use thiserror::Error;

/// Errors produced by validation, construction and verification routines.
///
/// Every failure that comes out of a scan carries the witness that made it
/// fail, so callers can re-check the claim independently.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Malformed or invariant-violating input. `pointer` is a JSON-pointer
    /// style location ("/values/2", "/table/3/1") into the offending document.
    #[error("invalid input at {pointer}: {message}")]
    Invalid { pointer: String, message: String },

    #[error("table is not commutative: witness pair ({m}, {n})")]
    NotCommutative { m: usize, n: usize },

    #[error("table is not associative: witness triple ({m}, {n}, {k})")]
    NotAssociative { m: usize, n: usize, k: usize },

    #[error("identity law fails at element {m}")]
    BrokenIdentity { m: usize },

    #[error("convolution undefined for pair ({m}, {n}): product left the window")]
    OutOfWindow { m: usize, n: usize },

    #[error("parameter out of range: {0}")]
    Parameter(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),
}

impl Error {
    pub fn invalid(pointer: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Invalid {
            pointer: pointer.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
