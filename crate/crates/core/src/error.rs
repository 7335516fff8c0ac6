use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A malformed input row; `line` is 1-based.
    #[error("{path}:{line}: {message}")]
    MalformedRow {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("invalid resource {path}: {message}")]
    Resource { path: PathBuf, message: String },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unsupported language code {0:?} (expected en or it)")]
    UnsupportedLanguage(String),

    #[error("no lemma table loaded for language {0}")]
    MissingLemmaTable(String),

    #[error("no sentiment lexicon loaded for language {0}")]
    MissingLexicon(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("empty input: {0}")]
    Empty(String),

    #[error("topic selector chose no topic in round {round}")]
    NoTopicSelected { round: usize },

    #[error("tweet {id} appears in both inputs with different texts")]
    IdCollision { id: String },

    #[error("eigenvector iteration did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("stage {stage}: missing upstream output {path}")]
    MissingUpstream { stage: String, path: PathBuf },

    #[error("stage {stage} failed: {message}")]
    Stage { stage: String, message: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn resource(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Resource {
            path: path.into(),
            message: message.into(),
        }
    }

    /// Process exit code: 1 config error, 2 data error, 3 stage failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::UnsupportedLanguage(_) => 1,
            Error::Io { .. } | Error::MalformedRow { .. } | Error::Resource { .. } => 2,
            Error::IdCollision { .. } | Error::MissingLemmaTable(_) | Error::MissingLexicon(_) => 2,
            _ => 3,
        }
    }
}
