//! `statexfer`: build chains, score encodings, sweep disorder, re-optimize
//! end couplings and run the free-fermion oracle.
//!
//! Exit codes: 0 success, 2 usage or input error, 3 numerical failure.

mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

const EXIT_USAGE: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<statexfer::Error>() {
        Some(e) if e.is_numerical() => EXIT_NUMERICAL,
        _ => EXIT_USAGE,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Build(a) => commands::build(a),
        Command::Fidelity(a) => commands::fidelity(a),
        Command::Sweep(a) => commands::sweep_cmd(a),
        Command::Optimize(a) => commands::optimize(a),
        Command::Oracle(a) => commands::oracle(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
