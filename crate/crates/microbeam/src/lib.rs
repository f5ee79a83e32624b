//! File formats, configuration and the command-line front end for
//! `microbeam-core`.

pub mod commands;
pub mod config;
pub mod error;
pub mod formats;
pub mod fsutil;
pub mod pipeline;

pub use config::{ExperimentConfig, Profile};
pub use error::{CliError, Result};
