use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("validation error: {0}")]
    Validation(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 1 for bad input, 2 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) | CliError::Io(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

impl From<susy_sta::Error> for CliError {
    fn from(e: susy_sta::Error) -> Self {
        match e {
            susy_sta::Error::InvalidParameter(m) => CliError::Validation(m),
            other => CliError::Numerical(other.to_string()),
        }
    }
}
