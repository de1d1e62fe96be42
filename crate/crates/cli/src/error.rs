use capacitary_core::Error as CoreError;

/// Failures of a run, each with its exit status.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("solver error: {0}")]
    Solver(CoreError),
    #[error("mesh validation failed:\n  {}", .0.join("\n  "))]
    Validation(Vec<String>),
    #[error("{0}")]
    Check(String),
    #[error("cannot read {path}: {message}")]
    Unreadable { path: String, message: String },
    #[error("cannot write {path}: {message}")]
    Write { path: String, message: String },
    #[error("unsupported {0}")]
    Unsupported(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Solver(_) | CliError::Write { .. } => 2,
            CliError::Validation(_) | CliError::Check(_) => 3,
            CliError::Unreadable { .. } => 4,
            CliError::Unsupported(_) => 5,
        }
    }

    /// Maps kernel errors: degenerate geometry is a validation failure,
    /// everything else a solver failure.
    pub fn from_core(e: CoreError) -> Self {
        match e {
            CoreError::DegenerateMesh(m) => CliError::Validation(vec![m]),
            other => CliError::Solver(other),
        }
    }
}
