use thiserror::Error;

/// Failure categories for the whole toolkit. Each maps to a process exit
/// code so front ends can distinguish bad inputs from bad runs.
#[derive(Debug, Error)]
pub enum Error {
    /// Rejected configuration or inadmissible run setup.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// State norm exceeded the divergence guard or became non-finite.
    #[error("trajectory diverged at step {step} (state norm above {limit:.1e} or non-finite)")]
    Divergence { step: usize, limit: f64 },

    /// A Lyapunov certificate or its class-K bounds failed validation.
    #[error("certificate error: {0}")]
    Certificate(String),

    /// Numeric failure: non-convergence or out-of-range intermediate.
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// Reading or writing an artifact failed.
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code: 2 config/io, 3 divergence, 4 certificate/numeric.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Io(_) => 2,
            Error::Divergence { .. } => 3,
            Error::Certificate(_) | Error::Numeric(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
