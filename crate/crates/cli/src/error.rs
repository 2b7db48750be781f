use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Unusable configuration or input source; exit code 2.
    #[error("configuration error: {0}")]
    Config(String),
    /// Input that cannot produce any result (for example, no samples).
    #[error("{0}")]
    Data(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) | CliError::Io(_) => 1,
        }
    }
}

/// Line counts from a batch command.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunSummary {
    pub lines: usize,
    pub failures: usize,
}

impl RunSummary {
    pub fn exit_code(&self) -> i32 {
        if self.failures > 0 {
            1
        } else {
            0
        }
    }
}
