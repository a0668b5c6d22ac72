use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on the inputs was violated.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An iterative routine ran out of budget. Carries the best estimate
    /// reached and the error bound actually achieved.
    #[error("{context}: no convergence (best so far {best}, achieved tolerance {achieved})")]
    NoConvergence {
        context: String,
        best: f64,
        achieved: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
