use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    Dimension {
        context: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("invalid argument: {0}")]
    Argument(String),
    /// A configuration violates a hard constraint; the message names the inequality.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("unsupported problem: {0}")]
    Unsupported(String),
    #[error("non-finite value at iteration {iter}: {what}")]
    Numerical { iter: usize, what: String },
    #[error("ill-conditioned instance: {0}")]
    IllConditioned(String),
    #[error("degenerate instance: {0}")]
    Degenerate(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(context: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::Dimension { context, expected, got })
    }
}
