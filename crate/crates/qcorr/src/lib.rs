//! File formats, reports and the command-line front end for `qcorr-core`.

pub mod cli;
mod error;
pub mod formats;
pub mod report;
pub mod specs;

pub use error::{CliError, CliResult};
