use jc_core::JcError;
use thiserror::Error;

/// Failures sorted by exit code: bad input exits with 2, a run that starts
/// but cannot finish exits with 3.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn runtime(msg: impl Into<String>) -> Self {
        CliError::Runtime(msg.into())
    }

    /// Library error raised while handling scenario section `section`.
    pub fn from_core(section: &str, e: JcError) -> Self {
        let msg = format!("{section}: {e}");
        match e {
            JcError::QuadratureNonConvergence { .. }
            | JcError::NonFinite { .. }
            | JcError::TraceDrift { .. }
            | JcError::FitFailed { .. } => CliError::Runtime(msg),
            _ => CliError::Config(msg),
        }
    }

    pub fn field(section: &str, e: JcError) -> Self {
        Self::from_core(section, e)
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Runtime(m) => m,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}
