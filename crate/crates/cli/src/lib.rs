//! Library side of the `alqc` command: configuration, the analyses behind each
//! subcommand and output writing. The binary only parses arguments.

// Validation uses `!(x > 0.0)` on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod output;
pub mod table;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("computation failed: {0}")]
    Compute(String),
    #[error("cannot write output: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Compute(_) | CliError::Io(_) => 3,
        }
    }
}

/// Files to write (name, contents) plus a short human-readable summary.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Output {
    pub files: Vec<(String, String)>,
    pub summary: String,
}
