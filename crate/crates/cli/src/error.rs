use std::fmt;

use swegsa::error::{CampaignError, IoError, SolverError};

/// Failure with its process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags or configuration (exit 2).
    Config(String),
    /// The solver produced non-finite values (exit 3).
    Numerical(String),
    /// Some campaign runs did not complete (exit 4).
    Incomplete(String),
    /// Anything else, such as a failed write (exit 1).
    Other(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Other(_) => 1,
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Incomplete(_) => 4,
        }
    }

    pub fn config(msg: impl fmt::Display) -> Self {
        CliError::Config(msg.to_string())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) | CliError::Numerical(m) | CliError::Incomplete(m) | CliError::Other(m) => f.write_str(m),
        }
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::NonFinite { .. } => CliError::Numerical(e.to_string()),
            SolverError::Invalid(_) => CliError::Config(e.to_string()),
            SolverError::Timeout { .. } => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<CampaignError> for CliError {
    fn from(e: CampaignError) -> Self {
        match e {
            CampaignError::Incomplete { .. } | CampaignError::Interrupted { .. } => CliError::Incomplete(e.to_string()),
            CampaignError::Solver(s) => s.into(),
            CampaignError::Io(IoError::Io { .. }) => CliError::Other(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

/// Output files that fail to write.
pub fn output(e: IoError) -> CliError {
    CliError::Other(e.to_string())
}
