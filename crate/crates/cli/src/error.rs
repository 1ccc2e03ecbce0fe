use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Solver(#[from] helmfft::Error),

    #[error("verification failed: {0}")]
    Verify(String),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status: 2 for bad input, 3 for solver failures, 4 when a
    /// verification tolerance is missed.
    pub fn exit_code(&self) -> i32 {
        use helmfft::Error as E;
        match self {
            Self::Solver(E::InvalidGrid(_) | E::UnsupportedBoundary(_) | E::SizeLimit { .. }) => 2,
            Self::Solver(_) => 3,
            Self::Verify(_) => 4,
            Self::Config(_) | Self::Io { .. } | Self::Csv(_) | Self::Json(_) => 2,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
