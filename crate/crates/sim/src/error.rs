use std::io;

pub type Result<T> = std::result::Result<T, HarnessError>;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("invalid experiment configuration: {0}")]
    Config(String),

    #[error("cannot build model for n = {n}: {source}")]
    Model {
        n: usize,
        #[source]
        source: screenfail_core::Error,
    },

    #[error("replication {rep_index} at n = {n} failed: {source}")]
    Replication {
        n: usize,
        rep_index: usize,
        #[source]
        source: screenfail_core::Error,
    },

    #[error("oracle: {0}")]
    Oracle(String),

    #[error("worker pool: {0}")]
    Pool(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
