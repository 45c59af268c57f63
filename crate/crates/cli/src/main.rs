mod artifacts;
mod commands;
mod config;
mod error;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use commands::Status;
use config::{Cli, RunConfig};
use error::CliError;

fn execute(cli: Cli) -> Result<Status, CliError> {
    let cfg = RunConfig::resolve(cli.command, cli.opts)?;
    let outcome = match cfg.jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build()
            .map_err(|e| CliError::Usage(format!("--jobs {j}: {e}")))?
            .install(|| commands::run(&cfg))?,
        None => commands::run(&cfg)?,
    };
    for line in &outcome.lines {
        println!("{line}");
    }
    let manifest = outcome.artifacts.write(&cfg)?;
    for f in &manifest.outputs {
        println!("wrote {}", cfg.out.join(&f.file).display());
    }
    Ok(outcome.status)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(3),
            };
        }
    };
    match execute(cli) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::ChecksFailed) => ExitCode::from(1),
        Ok(Status::Anomaly) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
