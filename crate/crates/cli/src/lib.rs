//! Command-line front end for the overlapping-samples t-tests: running the
//! test on data files, sweeping simulation grids and reproducing the
//! published Type I error tables.

pub mod commands;
pub mod config;
pub mod data;
pub mod error;
pub mod output;
pub mod reproduce;

pub use config::{OutputFormat, RunConfig};
pub use error::{exit, CliError, Result};
pub use reproduce::Table;
