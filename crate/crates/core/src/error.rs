use std::path::PathBuf;

use crate::oracle::Key;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("key {0} is already present")]
    Duplicate(Key),
    #[error("key {0} is not present")]
    NotFound(Key),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("capacity {capacity} exceeded")]
    Capacity { capacity: usize },
    #[error("key {0} has no frequency estimate; paired structures require one")]
    MissingEstimate(Key),
    #[error("unknown structure `{0}`")]
    UnknownStructure(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
