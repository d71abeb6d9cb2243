use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate bounding box: {0}")]
    DegenerateBox(String),

    #[error("oracle input too large: {len} elements (cap {cap})")]
    OracleTooLarge { len: usize, cap: usize },

    #[error("singular system in dense solve")]
    Singular,

    #[error("config {path}:{line}: {msg}")]
    Config { path: String, line: usize, msg: String },

    #[error("{path}:{line}: cannot parse ground-truth line {content:?}")]
    GroundTruthParse { path: PathBuf, line: usize, content: String },

    #[error("missing {what}: {path}")]
    Missing { what: &'static str, path: PathBuf },

    #[error("image {path}: {source}")]
    Image {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("empty input: {0}")]
    Empty(&'static str),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// True for errors in caller-supplied parameters or configuration, as
    /// opposed to problems with the data being processed.
    pub fn is_usage_error(&self) -> bool {
        matches!(self, Error::Config { .. } | Error::InvalidParameter(_))
    }
}
