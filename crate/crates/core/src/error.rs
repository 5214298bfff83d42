use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("cannot train a language model on an empty corpus")]
    EmptyCorpus,

    #[error("n-gram order {order} outside the model range 1..={max_order}")]
    OrderOutOfRange { order: usize, max_order: usize },

    #[error("cannot score an empty text")]
    EmptyText,

    #[error("bigram overlap needs an original text of at least 2 tokens, got {0}")]
    TooShortForBigrams(usize),

    #[error("operation {0} is not enabled in this configuration")]
    OpDisabled(crate::ops::Op),

    #[error("REDA_NG mode requires a language model")]
    MissingModel,
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}
