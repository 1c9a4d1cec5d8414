//! Configuration, subcommands and CSV output for the `regge` binary.

pub mod commands;
pub mod config;
pub mod csv;

pub use commands::CliError;
pub use config::RunConfig;
