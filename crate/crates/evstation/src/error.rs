use std::io;
use std::path::PathBuf;

/// Failures surfaced to the command line, grouped by exit status.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("configuration: {0}")]
    Config(String),
    #[error("scenario: {0}")]
    Scenario(String),
    #[error("{aborted} run(s) aborted; first: {first}")]
    RunAbort { aborted: usize, first: String },
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}: {source}", path.display())]
    Csv { path: PathBuf, source: csv::Error },
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Self::Config(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    pub fn csv(path: impl Into<PathBuf>, source: csv::Error) -> Self {
        Self::Csv {
            path: path.into(),
            source,
        }
    }

    /// Process exit status: 2 configuration, 3 scenario, 4 aborted runs,
    /// 1 for output failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Scenario(_) => 3,
            Self::RunAbort { .. } => 4,
            Self::Io { .. } | Self::Csv { .. } => 1,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
