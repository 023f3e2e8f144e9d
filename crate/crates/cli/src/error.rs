use qfm_core::Error as CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },

    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        source: std::io::Error,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("{0}")]
    ChecksFailed(String),
}

impl CliError {
    /// 2 for unreadable or malformed input, 3 for invalid matrices or arguments, 4 for
    /// numerical failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Read { .. } | CliError::Parse(_) => 2,
            CliError::Dimension(_) | CliError::Argument(_) => 3,
            CliError::Write { .. } => 4,
            CliError::ChecksFailed(_) => 4,
            CliError::Core(e) => match e {
                CoreError::NotHermitian { .. }
                | CoreError::DimensionMismatch { .. }
                | CoreError::PartitionMismatch(_)
                | CoreError::NotPositive { .. }
                | CoreError::EmptySelection
                | CoreError::DimsTooSmall(_)
                | CoreError::InvalidMode { .. }
                | CoreError::PolicyMismatch(_)
                | CoreError::DegreeTooLarge { .. }
                | CoreError::BasisTooLarge { .. } => 3,
                CoreError::DomainError { .. }
                | CoreError::SingularBlock { .. }
                | CoreError::SingularMatrix
                | CoreError::NotStrictlyPositive { .. }
                | CoreError::NotAState { .. } => 4,
            },
        }
    }
}
