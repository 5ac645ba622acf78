//! Command-line orchestration of the biomarker pipeline: configuration,
//! artifact writing and one function per subcommand.

pub mod commands;
pub mod config;
mod error;
pub mod input;
pub mod output;

pub use commands::{run, Command};
pub use config::{Normalize, RunConfig};
pub use error::{CliError, CliResult};
