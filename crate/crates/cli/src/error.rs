use thiserror::Error;

/// Exit code for numerical failures (non-convergence, conditioning, failed checks).
pub const EXIT_NUMERICAL: i32 = 1;
/// Exit code for malformed input.
pub const EXIT_BAD_INPUT: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("bad input: {0}")]
    BadInput(String),
    #[error(transparent)]
    Numerical(opaz::Error),
    #[error("verification failed: {0}")]
    Verification(String),
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
            CliError::BadInput(_) | CliError::Io { .. } => EXIT_BAD_INPUT,
            CliError::Numerical(_) | CliError::Verification(_) => EXIT_NUMERICAL,
        }
    }
}

impl From<opaz::Error> for CliError {
    fn from(e: opaz::Error) -> Self {
        match e {
            opaz::Error::Domain(m) | opaz::Error::InvalidWeights(m) | opaz::Error::Parse(m) => {
                CliError::BadInput(m)
            }
            other => CliError::Numerical(other),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
