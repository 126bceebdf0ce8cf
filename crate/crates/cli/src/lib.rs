//! Argument handling and command dispatch for the `translator-lab` binary.

pub mod args;
pub mod run;

pub use args::{parse_args, ArgsError, RunConfig, UsageError};
pub use run::run;
