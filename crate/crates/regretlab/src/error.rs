use std::path::PathBuf;

use regretlab_core::Error as CoreError;

/// Errors surfaced by the file formats and the command line.
#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error("invalid `{field}`: {reason}")]
    Invalid { field: String, reason: String },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type AppResult<T> = Result<T, AppError>;

impl AppError {
    pub fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        AppError::Invalid {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        AppError::Io {
            path: path.into(),
            source,
        }
    }

    /// 2 for bad input, 3 for file system failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            AppError::Invalid { .. } => 2,
            AppError::Io { .. } => 3,
        }
    }
}

impl From<CoreError> for AppError {
    fn from(e: CoreError) -> Self {
        let field = match &e {
            CoreError::InvalidConfig { field, .. } => field,
            CoreError::InvalidAlpha(_) => "alpha",
            CoreError::InvalidDelta(_) => "delta",
            CoreError::HorizonTooSmall { .. } | CoreError::RoundOutOfRange { .. } => "horizon",
            CoreError::PayoffOutOfRange { .. } => "payoffs",
            CoreError::EnumerationGuard { .. } => "horizon",
            CoreError::StrategyOutOfRange { .. } | CoreError::LengthMismatch { .. } => "n",
            _ => "input",
        };
        let reason = match &e {
            CoreError::InvalidConfig { reason, .. } => reason.clone(),
            other => other.to_string(),
        };
        AppError::Invalid {
            field: field.to_string(),
            reason,
        }
    }
}
