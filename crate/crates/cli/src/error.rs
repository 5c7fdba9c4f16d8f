use rd3_bvp::BvpError;
use thiserror::Error;

/// Error classes with their process exit codes.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("no solution: {0}")]
    Existence(String),
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("invalid input: {0}")]
    Domain(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Existence(_) => 2,
            CliError::NoConvergence(_) => 3,
            CliError::Domain(_) => 4,
            CliError::Io(_) => 5,
        }
    }
}

impl From<rd3_core::Error> for CliError {
    fn from(e: rd3_core::Error) -> Self {
        use rd3_core::Error as E;
        let msg = e.to_string();
        match e {
            E::Existence(_) | E::NoRoot { .. } | E::BoundaryRoot { .. } | E::NotFound(_) => CliError::Existence(msg),
            E::Convergence(_) => CliError::NoConvergence(msg),
            E::InvalidParams(_) | E::Domain(_) | E::Range(_) | E::Resonance(_) | E::Interval { .. } => {
                CliError::Domain(msg)
            }
        }
    }
}

impl From<BvpError> for CliError {
    fn from(e: BvpError) -> Self {
        let msg = e.to_string();
        match e {
            BvpError::Core(c) => c.into(),
            BvpError::NoConvergence { .. } | BvpError::SingularJacobian(_) | BvpError::StepUnderflow { .. } => {
                CliError::NoConvergence(msg)
            }
            BvpError::NotFound(_) => CliError::Existence(msg),
            BvpError::Invalid(_) => CliError::Domain(msg),
            BvpError::Io(_) | BvpError::Json(_) => CliError::Io(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
