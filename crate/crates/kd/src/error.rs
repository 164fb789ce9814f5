use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] kd_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse {
        path: String,
        source: serde_json::Error,
    },
    #[error("{0}")]
    Invalid(String),
    #[error("verification failed for d = {0}")]
    VerificationFailed(usize),
}

impl CliError {
    /// 2 for validation and I/O problems, 3 for a failed assertion, 4 when
    /// the membership solver hit its iteration cap.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(kd_core::Error::SolverDidNotConverge { .. }) => 4,
            CliError::VerificationFailed(_) => 3,
            _ => 2,
        }
    }
}
