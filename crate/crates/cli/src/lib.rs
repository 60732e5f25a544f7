//! Command-line front end: scene descriptors, analyses and writers.

pub mod export;
mod run;
pub mod scene;

pub use run::{run_cli, CliError};
