use thiserror::Error;

/// Errors raised by the optimizer, the metrics and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unknown function id `{0}`")]
    UnknownFunction(String),

    #[error("unknown configuration label `{0}`")]
    UnknownConfig(String),

    #[error("singular interpolation system: abscissae are not pairwise distinct")]
    SingularSystem,

    #[error("empty ensemble")]
    EmptyEnsemble,

    #[error("missing function `{0}` in suite-level aggregate")]
    MissingFunction(String),

    #[error("missing results: {0}")]
    MissingResults(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("malformed result file {path}: {reason}")]
    Parse { path: String, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}
