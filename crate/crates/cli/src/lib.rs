//! Command-line and HTTP front ends for `dubrovin-core`.

pub mod args;
pub mod run;
pub mod service;

pub use args::Cli;
pub use run::{run, CliError};
