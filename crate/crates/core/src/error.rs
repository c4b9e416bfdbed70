use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Operands live on different atom sets.
    #[error("atom-set mismatch: {left} atoms vs {right} atoms")]
    AtomMismatch { left: usize, right: usize },

    #[error("elements {first} and {second} are not orthogonal")]
    Orthogonality { first: String, second: String },

    #[error("not closed: {0}")]
    Closure(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("format error at {location}: {message}")]
    Format { location: String, message: String },

    #[error("size guard exceeded: {what} needs {needed}, guard is {limit}")]
    SizeGuard {
        what: &'static str,
        needed: u128,
        limit: u128,
    },

    #[error("invariant violated: {0}")]
    InvariantViolation(String),
}

impl Error {
    pub(crate) fn format(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Format {
            location: location.into(),
            message: message.into(),
        }
    }

    pub(crate) fn guard(what: &'static str, needed: u128, limit: u128) -> Self {
        Error::SizeGuard {
            what,
            needed,
            limit,
        }
    }
}
