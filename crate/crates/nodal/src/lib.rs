//! Command-line experiments on top of `nodal-core`: typed parameters, run
//! manifests, CSV and binary artifacts, and a thread-pool executor.

pub mod cli;
pub mod error;
pub mod exec;
pub mod manifest;
pub mod output;
pub mod params;
pub mod run;

pub use error::{CliError, Result};
