use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to read {path}: {source}")]
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

    #[error("duplicate document id `{doc_id}` in category `{category}`")]
    DuplicateDocument { category: String, doc_id: String },

    #[error("labeled dataset requested but documents have no label: {}", .0.join(", "))]
    MissingLabels(Vec<String>),

    #[error("unigram `{unigram}` does not occur in document `{doc_id}`")]
    UnigramNotInDocument { unigram: String, doc_id: String },

    #[error("class {0} has no training instances")]
    EmptyClass(crate::corpus::Class),

    #[error("dataset has no class labels")]
    Unlabeled,

    #[error("{0}")]
    InvalidInput(String),
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
