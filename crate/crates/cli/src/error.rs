use gateaux_core::GateauxError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad arguments, malformed or inconsistent input; exit code 2.
    #[error("{0}")]
    Input(String),
    /// A solver stopped without a certificate either way; exit code 3.
    #[error("indeterminate: {message}")]
    Indeterminate {
        message: String,
        iterations: usize,
        objective: f64,
        lower_bound: f64,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Indeterminate { .. } => 3,
        }
    }
}

impl From<GateauxError> for CliError {
    fn from(e: GateauxError) -> Self {
        match e {
            GateauxError::Indeterminate {
                iterations,
                objective,
                lower_bound,
            } => CliError::Indeterminate {
                message: e.to_string(),
                iterations,
                objective,
                lower_bound,
            },
            GateauxError::NoConvergence { iterations } => CliError::Indeterminate {
                message: e.to_string(),
                iterations,
                objective: f64::NAN,
                lower_bound: f64::NAN,
            },
            other => CliError::Input(other.to_string()),
        }
    }
}
