use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad arguments, config keys or values, or plot columns.
    #[error("usage error: {0}")]
    Usage(String),

    /// The resource guard refused the run.
    #[error("capacity error: {0}")]
    Capacity(String),

    /// Solver or audit failure.
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("{context}: {source}")]
    Core {
        context: String,
        #[source]
        source: icebox_core::Error,
    },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// Process exit status: 1 usage, 2 capacity, 3 anything that failed while running.
    pub fn exit_code(&self) -> u8 {
        use icebox_core::Error as E;
        match self {
            CliError::Usage(_) => 1,
            CliError::Capacity(_) => 2,
            CliError::Core { source, .. } => match source {
                E::Domain(_) | E::Unsupported(_) => 1,
                E::Capacity(_) => 2,
                _ => 3,
            },
            CliError::Numerical(_) | CliError::Io(_) => 3,
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(std::io::Error::other(e))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(std::io::Error::other(e))
    }
}

pub trait Context<T> {
    fn context(self, what: impl Into<String>) -> Result<T, CliError>;
}

impl<T> Context<T> for icebox_core::Result<T> {
    fn context(self, what: impl Into<String>) -> Result<T, CliError> {
        self.map_err(|source| CliError::Core {
            context: what.into(),
            source,
        })
    }
}
