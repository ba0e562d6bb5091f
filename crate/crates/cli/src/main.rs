use std::process::ExitCode;

use clap::Parser;

mod args;
mod commands;
mod error;

use args::{Cli, Command};
use error::CliError;

fn run(cli: Cli) -> Result<bool, CliError> {
    if let Some(jobs) = cli.global.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let g = &cli.global;
    match &cli.command {
        Command::Parse { file } => commands::parse_cmd(g, file),
        Command::Score(args) => commands::score_cmd(g, args).map(|()| true),
        Command::Simulate { file, trace } => commands::simulate_cmd(g, file, *trace),
        Command::Generate(args) => commands::generate_cmd(g, args).map(|()| true),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("gdt: {e}");
            e.exit_code()
        }
    }
}
