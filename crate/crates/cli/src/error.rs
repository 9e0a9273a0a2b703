use std::fmt;

use rfstat_core::Error;

pub const CONFIG: u8 = 2;
pub const IO: u8 = 3;
pub const NO_CONVERGENCE: u8 = 4;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError {
            code: CONFIG,
            message: message.into(),
        }
    }

    pub fn io(message: impl Into<String>) -> Self {
        CliError {
            code: IO,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

/// File and parse problems are I/O errors; an unresolved Mollow fit counts
/// as non-convergence; everything else is a bad configuration.
fn code_of(e: &Error) -> u8 {
    match e {
        Error::AtPath { source, .. } => match **source {
            Error::InvalidParameter { .. } | Error::Inconsistent(_) => CONFIG,
            _ => IO,
        },
        Error::Io(_) | Error::Parse { .. } | Error::Unsorted { .. } | Error::OutOfRange { .. } => IO,
        Error::TripletUnresolved { .. } => NO_CONVERGENCE,
        _ => CONFIG,
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError {
            code: code_of(&e),
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::io(e.to_string())
    }
}
