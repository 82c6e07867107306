//! Configuration parsing, subcommands and CSV output for the `pickmoments`
//! binary.

pub mod commands;
pub mod config;

pub use commands::{run, Command, ExitCode, Failure};
pub use config::{parse_config, render, ConfigError, RunConfig};
