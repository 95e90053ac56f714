//! Configuration, seeded chain execution and subcommands behind the `dpem`
//! binary.

pub mod commands;
pub mod config;
mod error;
pub mod run;
pub mod summary;

pub use config::{ComponentConfig, DataConfig, Method, OutputConfig, RunConfig, SamplerSection};
pub use error::{CliError, CliResult};
