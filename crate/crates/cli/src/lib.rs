//! Library side of the `lovx` command-line tool.

pub mod checks;
pub mod commands;
pub mod error;
pub mod input;
pub mod problems;
pub mod report;

pub use commands::{run, Cli, Outcome};
pub use error::CliError;
