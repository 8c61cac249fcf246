use std::path::PathBuf;

/// Failure categories of the driver, each with its own exit status.
#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Numeric(#[from] tfspde_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Failed(String),
}

impl AppError {
    pub fn validation(e: tfspde_core::Error) -> Self {
        AppError::Validation(e.to_string())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        AppError::Io { path: path.into(), source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Parse(_) => 2,
            AppError::Validation(_) => 3,
            AppError::Numeric(_) | AppError::Failed(_) => 4,
            AppError::Io { .. } => 1,
        }
    }

    /// Machine-readable category printed with the message.
    pub fn category(&self) -> &'static str {
        match self {
            AppError::Parse(_) => "parse",
            AppError::Validation(_) => "validation",
            AppError::Numeric(_) => "numeric",
            AppError::Io { .. } => "io",
            AppError::Failed(_) => "check",
        }
    }
}
