use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("config key `{key}`: {reason}")]
    Config { key: String, reason: String },
    #[error("failed to parse config: {0}")]
    ConfigParse(#[from] serde_json::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Core(#[from] ftpomdp_core::Error),
    #[error("episode {episode} (seed {seed}) failed: {source}")]
    Episode { episode: usize, seed: u64, source: ftpomdp_core::Error },
    #[error("no certificate telemetry: {0}")]
    MissingTelemetry(String),
}

impl BenchError {
    pub(crate) fn config(key: &str, reason: impl Into<String>) -> Self {
        BenchError::Config { key: key.to_string(), reason: reason.into() }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        BenchError::Io { path: path.into(), source }
    }

    /// Stable name printed by the CLI on failure.
    pub fn class(&self) -> &'static str {
        match self {
            BenchError::Config { .. } | BenchError::ConfigParse(_) => "ConfigError",
            BenchError::Io { .. } => "IoError",
            BenchError::Csv(_) => "CsvError",
            BenchError::Core(e) | BenchError::Episode { source: e, .. } => e.class(),
            BenchError::MissingTelemetry(_) => "MissingTelemetry",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Config { .. } | BenchError::ConfigParse(_) => 2,
            BenchError::Io { .. } | BenchError::Csv(_) => 3,
            BenchError::Core(_) | BenchError::Episode { .. } => 4,
            BenchError::MissingTelemetry(_) => 5,
        }
    }
}

pub type Result<T, E = BenchError> = std::result::Result<T, E>;
