use std::process::ExitCode;

use clap::Parser;
use popsim_cli::args::{execute, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("popsim: {e}");
            ExitCode::from(2)
        }
    }
}
