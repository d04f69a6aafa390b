//! Command-line front end for `trifree`: file formats, generators, the
//! benchmark harness and the subcommands themselves.

pub mod bench;
pub mod commands;
pub mod formats;
pub mod generators;

pub use commands::{run, Cli, CliError};
