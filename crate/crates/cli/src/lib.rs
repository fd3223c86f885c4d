//! Library side of the `popsim` command: experiment specs, the run, bench
//! and verify subcommands, and their file formats.

pub mod args;
pub mod bench;
pub mod error;
pub mod protocols;
pub mod run;
pub mod spec;
pub mod verify;

pub use error::{CliError, CliResult};
pub use spec::{ExperimentSpec, HeuristicFlags, ProtocolName};
