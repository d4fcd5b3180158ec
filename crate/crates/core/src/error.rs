use thiserror::Error;

/// Errors raised by the engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A configured size cap was exceeded. Enumerations never truncate silently.
    #[error("cap exceeded: {what} (limit {limit})")]
    CapExceeded { what: String, limit: usize },

    /// Structurally invalid input: bad ids, non-composable morphisms, non-total maps.
    #[error("malformed input: {0}")]
    Malformed(String),

    /// The target category did not produce a colimit it was asked for.
    #[error("colimit unavailable: {0}")]
    NoColimit(String),

    /// A hypothesis of an operation does not hold (e.g. an input cube is not good).
    #[error("hypothesis failed: {0}")]
    Hypothesis(String),

    /// A postcondition checked in verification mode failed.
    #[error("verification failed: {0}")]
    Verification(String),

    #[error("unknown name: {0}")]
    Unknown(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn malformed<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Malformed(msg.into()))
}
