use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An input violates a documented invariant (bad state, bad parameter).
    #[error("validation error: {0}")]
    Validation(String),

    /// A quenched-averaging plan or run configuration is unusable.
    #[error("configuration error: {0}")]
    Config(String),

    /// A numerical routine failed; `matrix` carries the offending input when there is one.
    #[error("numerical error: {message}{}", matrix.as_ref().map(|m| format!("\n{m}")).unwrap_or_default())]
    Numerical {
        message: String,
        matrix: Option<String>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>, matrix: Option<String>) -> Self {
        Error::Numerical {
            message: msg.into(),
            matrix,
        }
    }
}
