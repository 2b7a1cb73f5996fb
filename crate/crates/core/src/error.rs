use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument violates an operation's precondition.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported input: {0}")]
    Unsupported(String),

    /// Requested object would exceed a memory guard.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// An iterative method failed to reach its tolerance.
    #[error("{method} did not converge after {iterations} iterations (residuals: {residuals:?})")]
    NoConvergence {
        method: &'static str,
        iterations: usize,
        residuals: Vec<f64>,
    },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
