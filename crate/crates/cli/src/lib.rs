//! Command-line harness for the Local SGD simulator: JSON experiment
//! configs in, fixed-schema CSV out.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use config::{Experiment, ExperimentConfig};
pub use error::CliError;
