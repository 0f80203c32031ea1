use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] biphoton_core::Error),
    #[error("oracle disagreement: {0}")]
    Oracle(String),
    #[error("schema mismatch: {0}")]
    Schema(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Other(#[from] anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Invalid(_) | CliError::Core(_) | CliError::Oracle(_) => 3,
            CliError::Schema(_) => 4,
            CliError::Io(_) | CliError::Other(_) => 1,
        }
    }
}
