use std::path::PathBuf;

/// Errors reported by this crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A caller-supplied argument violated an operation's precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Malformed PBM data.
    #[error("pbm parse error: {0}")]
    PbmParse(String),

    /// Malformed weight CSV or checkpoint data.
    #[error("parse error: {0}")]
    Parse(String),

    /// Population seeding gave up: too many candidates in a row failed
    /// to reach full recognition (or duplicated existing members).
    #[error(
        "seeding infeasible for this configuration: {attempts} consecutive candidates \
         rejected ({training_failures} training failures, {duplicates} duplicates)"
    )]
    SeedingInfeasible {
        attempts: usize,
        training_failures: usize,
        duplicates: usize,
    },

    /// Bad experiment or CLI configuration.
    #[error("config error: {0}")]
    Config(String),

    /// An I/O failure, annotated with the path involved.
    #[error("i/o error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
