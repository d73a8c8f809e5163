use thiserror::Error;

/// Failure classes with distinct exit statuses.
#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable, malformed or inconsistent configuration.
    #[error("config error: {0}")]
    Config(String),

    /// Error reported by the numerical library while running.
    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("output error: {0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Output(_) => 1,
        }
    }
}

impl From<steerctl_core::Error> for CliError {
    fn from(e: steerctl_core::Error) -> Self {
        use steerctl_core::Error as E;
        match e {
            // rejected inputs
            E::InvalidEffect(_)
            | E::NonHermitian(_)
            | E::InvalidState(_)
            | E::InvalidGenerator(_)
            | E::InvalidParameter(_) => CliError::Config(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}
