use corrspec_core::Error;

pub type CliResult<T> = Result<T, CliError>;

/// Failures of a CLI run, split by the exit code they map to.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    /// The input violates a precondition of the requested pipeline.
    #[error("precondition failed: {0}")]
    Precondition(Error),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("format error: {0}")]
    Format(String),
}

impl CliError {
    /// Parameter and lattice errors are config problems; everything else the
    /// core reports is a property of the data.
    pub fn from_core(e: Error) -> Self {
        match e {
            Error::InvalidLattice(_) | Error::InvalidParameter(_) | Error::UnknownModel(_) | Error::IndexOutOfRange { .. } => {
                CliError::Config(e.to_string())
            }
            other => CliError::Precondition(other),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Precondition(_) => crate::exit::PRECONDITION,
            _ => crate::exit::CONFIG,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::from_core(e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Format(e.to_string())
    }
}
