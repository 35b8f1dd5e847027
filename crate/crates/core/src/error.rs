use std::path::PathBuf;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error in {path}: line {line}, column {column}: {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("pixel ({x}, {y}) has value {value}, expected 0, {gray_level} or 255")]
    PixelClass {
        x: u32,
        y: u32,
        value: u8,
        gray_level: u8,
    },

    #[error("feature column `{column}` is not finite ({value})")]
    NonFinite { column: String, value: f64 },

    #[error("k-means needs at least {k} distinct descriptors, got {available}")]
    TooFewDescriptors { k: usize, available: usize },

    #[error("training diverged at epoch {epoch} (last finite epoch: {last_finite:?})")]
    Divergence {
        epoch: usize,
        last_finite: Option<usize>,
    },

    #[error("dataset is empty: {0}")]
    EmptyData(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("image error: {0}")]
    Image(#[from] image::ImageError),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn json(path: impl std::fmt::Display, err: serde_json::Error) -> Self {
        Error::Parse {
            path: path.to_string(),
            line: err.line(),
            column: err.column(),
            message: err.to_string(),
        }
    }
}
