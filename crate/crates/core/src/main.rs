use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    groupform::cli::run(groupform::cli::Cli::parse())
}
