use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The requested policy is not defined for the given parameters
    /// (for example KS+MLP with a Zipf parameter of at most 1).
    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),

    #[error("placement failed: {0}")]
    Placement(String),

    #[error("sweep point {index} ({label}) failed: {source}")]
    SweepPoint {
        index: usize,
        label: String,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// Strips any [`Error::SweepPoint`] wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::SweepPoint { source, .. } => source.root(),
            other => other,
        }
    }
}
