use std::fmt;
use std::path::Path;

use emubench_core::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
/// Bad flags or config, unknown scenario, mismatched shapes.
pub const EXIT_USAGE: i32 = 2;
/// A reference trajectory left the finite range.
pub const EXIT_DIVERGED: i32 = 3;

/// Error carrying the process exit code it maps to.
#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    pub fn failure(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_FAILURE,
            message: message.into(),
        }
    }

    pub fn io(path: &Path, err: std::io::Error) -> Self {
        Self::failure(format!("{}: {err}", path.display()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        let code = match &err {
            Error::UnknownScenario(_) | Error::UnsupportedMode(_) | Error::InvalidArgument(_) | Error::ShapeMismatch(_) => {
                EXIT_USAGE
            }
            Error::Diverged { .. } | Error::SampleDiverged { .. } => EXIT_DIVERGED,
            _ => EXIT_FAILURE,
        };
        Self {
            code,
            message: err.to_string(),
        }
    }
}
