//! Command-line front end: argument parsing, experiments and acceptance suites.

pub mod commands;
pub mod error;
pub mod output;
pub mod spec;
pub mod verify;

pub use commands::{Cli, Command};
pub use error::{CliError, CliResult};
