//! Command-line front end: loads state and tree files, dispatches to the
//! `entroof` core and renders JSON reports.

pub mod args;
pub mod commands;
pub mod files;
pub mod report;

use std::fmt;

pub use args::Cli;
pub use commands::{run, Outcome, RunSettings};

/// Exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const MALFORMED_INPUT: i32 = 2;
    pub const INVALID_PARAMETERS: i32 = 3;
    pub const INTERNAL: i32 = 4;
    pub const INVALID_TREE: i32 = 5;
}

/// A diagnostic with the exit code it maps to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn malformed(message: impl Into<String>) -> Self {
        Self { code: exit::MALFORMED_INPUT, message: message.into() }
    }

    pub fn invalid(message: impl Into<String>) -> Self {
        Self { code: exit::INVALID_PARAMETERS, message: message.into() }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self { code: exit::INTERNAL, message: message.into() }
    }

    /// Classifies a core error raised while computing (not while loading).
    pub fn from_core(err: entroof::Error) -> Self {
        use entroof::Error as E;
        match err {
            E::InvalidParameter(_) | E::DegenerateDimension(_) => Self::invalid(err.to_string()),
            E::InvalidTree(_) => Self { code: exit::INVALID_TREE, message: err.to_string() },
            E::InvalidKraus(_) | E::DimensionMismatch(_) => Self::malformed(err.to_string()),
            _ => Self::internal(err.to_string()),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "error: {}", self.message)
    }
}

impl std::error::Error for CliError {}
