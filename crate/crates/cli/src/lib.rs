//! Command-line front end: dataset export, stencil experiments and metric reports.

pub mod commands;
pub mod config;
pub mod error;
pub mod export;

pub use commands::{run, Cli, Command};
pub use config::{ExportFormat, Overrides, RunConfig};
pub use error::{CliError, EXIT_DIVERGED, EXIT_FAILURE, EXIT_OK, EXIT_USAGE};
pub use export::{export_split, load_raw64, stream_split, ExportBundle, Sidecar};
