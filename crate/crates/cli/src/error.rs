use thiserror::Error;

/// Failures surfaced to the command line, each with its exit status.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad input file, config, or flag.
    #[error("{0}")]
    Input(String),
    /// A computation rejected its arguments.
    #[error("numeric error: {0}")]
    Domain(#[from] covprio_core::Error),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Input(_) | Self::Io(_) => 2,
            Self::Domain(_) => 3,
        }
    }
}
