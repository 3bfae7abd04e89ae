#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;
mod report;

use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use crate::args::Cli;
use crate::commands::{execute, CliError};
use crate::report::{render, RunRecord};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("hlx {}: {err}", cli.command.name());
            ExitCode::from(err.exit_code())
        }
    }
}

fn run(cli: &Cli) -> Result<u8, CliError> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let started = Instant::now();
    let outcome = execute(cli)?;
    let record = RunRecord::new(cli, outcome.config, outcome.payload, started.elapsed());
    let text = match outcome.raw {
        Some(raw) => raw,
        None => render(&record, cli.json, outcome.csv.as_deref())?,
    };
    match &cli.output {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io(path.display().to_string(), e))?,
        None => print!("{text}"),
    }
    Ok(outcome.exit_code)
}
