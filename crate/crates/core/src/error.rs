use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("integrity error: {0}")]
    Integrity(String),

    #[error(
        "n = {n} exceeds the configured limit of {limit}; the final step would hold \
         {estimated_states} score sequences (raise the limit to proceed)"
    )]
    LimitExceeded {
        n: usize,
        limit: usize,
        estimated_states: String,
    },

    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
