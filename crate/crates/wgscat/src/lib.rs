//! Command-line sweeps over `wgscat-core`: configuration, parallel
//! evaluation and deterministic CSV output.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod pool;

pub use cli::{resolve, Cli};
pub use commands::{execute, run, RunOutput, RunSummary};
pub use config::{Command, Overrides, RawValue, RunConfig};
pub use error::CliError;
pub use pool::ThreadPool;
