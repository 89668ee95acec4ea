use std::process::ExitCode;

use clap::Parser;
use wikiqual_cli::args::Cli;

fn main() -> ExitCode {
    match wikiqual_cli::run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("wikiqual: error: {}", wikiqual_cli::one_line(&err));
            ExitCode::FAILURE
        }
    }
}
