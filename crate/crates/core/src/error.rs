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

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("{kind} {id}: {field} refers to unknown {target_kind} {target}")]
    DanglingReference {
        kind: &'static str,
        id: String,
        field: &'static str,
        target_kind: &'static str,
        target: String,
    },

    #[error("duplicate {kind} id {id}")]
    DuplicateId { kind: &'static str, id: String },

    #[error("invalid {kind} {id}: {msg}")]
    InvalidRecord {
        kind: &'static str,
        id: String,
        msg: String,
    },

    #[error("category {0:?} has no answers")]
    EmptyCategory(String),

    #[error("need at least {needed} experts to split, found {found}")]
    TooFewExperts { needed: usize, found: usize },

    #[error("invalid split ratios {0:?}: must be non-negative and sum to 1")]
    InvalidRatios([f64; 3]),

    #[error("query is empty after analysis")]
    EmptyQuery,

    #[error("collection is empty")]
    EmptyCollection,

    #[error("index file: {0}")]
    IndexFormat(String),

    #[error("scorer {scorer_id} failed on pair (query {query:?}, text {text_preview:?}): {msg}")]
    Scorer {
        scorer_id: String,
        query: String,
        text_preview: String,
        msg: String,
    },

    #[error("scorer endpoint {endpoint}: {msg}")]
    RemoteScorer { endpoint: String, msg: String },

    #[error("run has queries without qrels: {0:?}")]
    MissingQrels(Vec<String>),

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("need at least 2 paired observations, got {0}")]
    TooFewObservations(usize),

    #[error("validation split has no queries")]
    EmptyValidation,

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
