//! Command-line driver for `grhcot-core`: cache files, parallel Gram sweeps,
//! configuration and JSON reports.

pub mod cache_io;
pub mod cli;
pub mod config;
pub mod error;
pub mod report;
pub mod sweep;

pub use error::{CliError, CliResult};
