use thiserror::Error;

/// Failures that end a command, mapped onto exit codes.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    /// Unbounded numerical radius or a non-member operand.
    #[error("{0}")]
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Domain(_) => 3,
        }
    }
}

impl From<arad::Error> for CliError {
    fn from(e: arad::Error) -> Self {
        match e {
            arad::Error::UnboundedNumericalRadius | arad::Error::NotInBA => {
                CliError::Domain(e.to_string())
            }
            other => CliError::Input(other.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
