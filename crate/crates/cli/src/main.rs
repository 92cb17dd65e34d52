mod args;
mod commands;
mod files;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};
use commands::Globals;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub const USAGE: u8 = 1;
    pub const VALIDATION: u8 = 2;
    pub const RUNTIME: u8 = 3;

    pub fn usage(message: impl Into<String>) -> Failure {
        Failure { code: Self::USAGE, message: message.into() }
    }

    pub fn validation(message: impl Into<String>) -> Failure {
        Failure { code: Self::VALIDATION, message: message.into() }
    }

    pub fn runtime(message: impl Into<String>) -> Failure {
        Failure { code: Self::RUNTIME, message: message.into() }
    }
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    let workers = match cli.workers {
        Some(0) => return Err(Failure::usage("--workers must be at least 1")),
        Some(w) => w,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    let g = Globals { seed: cli.seed, workers, out: cli.out };
    match &cli.command {
        Command::Build(a) => commands::build(a, &g),
        Command::Quantize(a) => commands::quantize(a, &g, false),
        Command::Encode(a) => commands::quantize(a, &g, true),
        Command::Decode(a) => commands::decode(a, &g),
        Command::Run(a) => commands::run(a, &g),
        Command::Bound(a) => commands::bound(a, &g),
        Command::VerifyExample => commands::verify(&g),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(Failure::USAGE),
            };
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
