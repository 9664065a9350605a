//! Command-line harness: ballot generation, corruption, tallying, the four
//! reproduction experiments, baseline benchmarks and statistics.

pub mod args;
pub mod bench;
pub mod commands;
pub mod experiments;
pub mod files;
pub mod pipeline;

use std::ffi::OsString;

use clap::Parser;

use crate::args::{Cli, Command, LexiconCommand};
use crate::commands::{Outcome, UsageError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_MISMATCH: i32 = 3;

/// Parses `argv`, runs the subcommand and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = match &cli.command {
        Command::Generate(a) => commands::generate(a),
        Command::Corrupt(a) => commands::corrupt(a),
        Command::Tally(a) => commands::tally(a),
        Command::Bench(a) => commands::bench(a),
        Command::Stats(a) => commands::stats(a),
        Command::Experiment(a) => commands::experiment(a),
        Command::Lexicon {
            command: LexiconCommand::Validate(a),
        } => commands::lexicon_validate(a),
    };
    match result {
        Ok(Outcome::Ok) => EXIT_OK,
        Ok(Outcome::Mismatch) => EXIT_MISMATCH,
        Err(e) if e.is::<UsageError>() => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_DATA
        }
    }
}
