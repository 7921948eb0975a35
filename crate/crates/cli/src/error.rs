use std::fmt;
use std::process::ExitCode;

#[derive(Debug)]
pub enum CliError {
    /// Bad configuration, arguments or I/O; exit code 1.
    Config(String),
    /// A numerical invariant failed; exit code 2.
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Config(_) => ExitCode::from(1),
            CliError::Numerical(_) => ExitCode::from(2),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "configuration error: {msg}"),
            CliError::Numerical(msg) => write!(f, "numerical error: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<etsim_core::Error> for CliError {
    fn from(e: etsim_core::Error) -> Self {
        use etsim_core::Error::*;
        match e {
            Invariant(_) | Overflow { .. } | GridMismatch(_) => CliError::Numerical(e.to_string()),
            Domain { .. } | InvalidParameter { .. } => CliError::Config(e.to_string()),
            StepSize { .. } => CliError::Config(format!("{e}; reduce run.dt")),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(format!("I/O failure: {e}"))
    }
}
