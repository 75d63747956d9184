use thiserror::Error;

/// Process exit code for usage errors.
pub const EXIT_USAGE: i32 = 2;
/// Process exit code when a solver failed to converge.
pub const EXIT_CONVERGENCE: i32 = 3;
/// Process exit code for unreadable or invalid data.
pub const EXIT_DATA: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),

    #[error("{0}")]
    Data(String),

    #[error(transparent)]
    Core(#[from] arbary::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Core(e) if e.is_convergence_failure() => EXIT_CONVERGENCE,
            CliError::Core(_) | CliError::Data(_) => EXIT_DATA,
        }
    }
}
