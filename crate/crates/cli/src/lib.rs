//! `avalanche`: network generation, simulation and analysis pipelines.
//!
//! Exit status is 0 on success, 1 on usage errors and 2 on data errors.

mod cli;
mod commands;

use std::ffi::OsString;

use clap::Parser;

pub use crate::commands::UsageError;

pub const EXIT_USAGE: u8 = 1;
pub const EXIT_DATA: u8 = 2;

/// Parses `args` (program name first), runs the subcommand and returns the
/// process exit status. Diagnostics go to stderr.
pub fn run_cli<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match cli::Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    match commands::run(cli.command) {
        Ok(()) => 0,
        Err(e) if e.downcast_ref::<UsageError>().is_some() => {
            eprintln!("error: {e}");
            eprintln!("Run 'avalanche --help' for usage.");
            EXIT_USAGE
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_DATA
        }
    }
}
