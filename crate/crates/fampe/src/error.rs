//! CLI-facing errors: every failure renders as one machine-parseable line,
//! `error: <code>: <message>`, and exits nonzero.

use std::fmt;
use std::path::Path;

#[derive(Debug)]
pub struct CliError {
    pub code: &'static str,
    pub message: String,
}

impl CliError {
    pub fn new(code: &'static str, message: impl Into<String>) -> Self {
        CliError { code, message: message.into() }
    }

    pub fn io(path: &Path, err: &std::io::Error) -> Self {
        CliError::new("io", format!("{}: {err}", path.display()))
    }

    pub fn format(message: impl Into<String>) -> Self {
        CliError::new("format", message)
    }

    pub fn config(message: impl Into<String>) -> Self {
        CliError::new("config", message)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "error: {}: {}", self.code, self.message)
    }
}

impl std::error::Error for CliError {}

impl From<fampe_core::Error> for CliError {
    fn from(err: fampe_core::Error) -> Self {
        use fampe_core::Error as E;
        let code = match err {
            E::NonFinite { .. } | E::NonFiniteAtIteration { .. } => "numeric",
            E::ShapeMismatch { .. } => "shape",
            E::ShiftState { .. } => "internal",
            E::InvalidCutoff { .. } | E::InvalidConfig { .. } => "config",
            E::DegenerateSpectrum => "spectrum",
            E::LabelOutOfRange { .. } | E::EmptyDataset => "dataset",
        };
        CliError::new(code, err.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
