use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument fell outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An index past the end of the prime table was requested.
    #[error("prime table exhausted: need {needed} primes but the table holds {available}")]
    TableExhausted { needed: usize, available: usize },

    /// The sieve bound is too small for the requested analytic guarantee.
    #[error("insufficient prime table: limit {limit} is below the required limit {required}")]
    InsufficientTable { limit: u64, required: u64 },

    /// A numeric self-check failed. Indicates a regression rather than bad input.
    #[error("internal consistency error: {0}")]
    Consistency(String),

    /// Malformed text input, such as an exported greedy trace.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid prime cache: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for errors caused by caller-supplied arguments.
    pub fn is_domain(&self) -> bool {
        matches!(
            self,
            Error::Domain(_)
                | Error::TableExhausted { .. }
                | Error::InsufficientTable { .. }
                | Error::Parse { .. }
        )
    }
}
