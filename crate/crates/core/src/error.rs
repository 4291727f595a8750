use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("no route between satellite {src} and satellite {dst}")]
    NoRoute { src: u32, dst: u32 },

    #[error("link saturated (load fraction {0} >= 1)")]
    SaturatedLink(f64),

    #[error("battery level out of [0, 1]: {0}")]
    BatteryDomain(f64),

    #[error("traffic splits sum to {actual} Mb but the task carries {expected} Mb")]
    SplitMismatch { expected: f64, actual: f64 },

    #[error("utility undefined: {0}")]
    UndefinedUtility(&'static str),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Catalog { path: PathBuf, message: String },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
