//! Command line front end: TOML scenarios in, CSV and JSON out.

pub mod commands;
pub mod config;
pub mod error;

pub use commands::Context;
pub use config::Scenario;
pub use error::CliError;
