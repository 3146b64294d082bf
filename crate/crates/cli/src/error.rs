use thiserror::Error;

/// Runner failures, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad config document or command line (exit 2).
    #[error("{0}")]
    Config(String),
    /// A numerical guard fired or a check failed (exit 1).
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numerical(_) => 1,
            CliError::Config(_) | CliError::Io { .. } => 2,
        }
    }

    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.display().to_string(), source }
    }
}
