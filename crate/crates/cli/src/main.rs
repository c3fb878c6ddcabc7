mod args;
mod commands;
mod config;
mod perturb;

use std::process::ExitCode;

use anyhow::Result;
use clap::Parser;

use crate::args::{Cli, Command};
use crate::commands::{execute, Settings};

/// Exit codes: 0 success, 1 invalid input or failed computation, 2 a
/// verification report above tolerance.
fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    let settings = Settings::from_env()?;
    if let Command::Run { config } = &cli.command {
        return config::run(config, &settings);
    }
    let outcome = execute(&cli.command, &settings)?;
    outcome.write()?;
    print!("{}", outcome.document);
    if outcome.verified == Some(false) {
        eprintln!("verification failed: residual above tolerance");
        return Ok(2);
    }
    Ok(0)
}
