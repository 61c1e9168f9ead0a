use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use pmc_core::cli::{emit, run, Cli, Status};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(Status::InputError as u8);
        }
    };
    match emit(&outcome, cli.output.as_ref()) {
        Ok(text) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(text.as_bytes()).is_err() {
                return ExitCode::from(Status::InputError as u8);
            }
        }
        Err(e) => {
            eprintln!("error: cannot write output: {e}");
            return ExitCode::from(Status::InputError as u8);
        }
    }
    if outcome.status != Status::Ok {
        eprintln!("property violation detected");
    }
    ExitCode::from(outcome.status as u8)
}
