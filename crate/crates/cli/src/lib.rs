//! Experiment harness behind the `switchlab` command.

pub mod diagnostics;
pub mod error;
pub mod estimate;
pub mod stats;
pub mod verify;

pub use error::{CliError, CliResult};
