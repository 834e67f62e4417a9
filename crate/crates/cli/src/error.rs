use thiserror::Error;

/// Failure of one pipeline stage. Each variant maps to its own exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("{stage}: {message}")]
    Input {
        stage: &'static str,
        message: String,
    },
    #[error("learn: {0}")]
    Learn(String),
    #[error("plan: no plan reaches the goal")]
    Unsolvable,
    #[error("validate: {0}")]
    Validation(String),
    #[error("plan: {0}")]
    SearchLimit(String),
    #[error("{stage}: {message}")]
    Output {
        stage: &'static str,
        message: String,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Output { .. } => 1,
            CliError::Config(_) => 2,
            CliError::Input { .. } => 3,
            CliError::Learn(_) => 4,
            CliError::Unsolvable => 5,
            CliError::Validation(_) => 6,
            CliError::SearchLimit(_) => 7,
        }
    }

    pub fn input(stage: &'static str, e: impl std::fmt::Display) -> Self {
        CliError::Input {
            stage,
            message: e.to_string(),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
