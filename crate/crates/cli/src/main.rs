use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use opaz_cli::error::{CliError, EXIT_NUMERICAL};
use opaz_cli::Cli;

fn run(cli: &Cli) -> Result<bool, CliError> {
    let report = cli.command.run()?;
    let format = cli.format.unwrap_or_else(|| cli.command.default_format());
    let bytes = report.render(format)?;
    match &cli.out {
        Some(path) => std::fs::write(path, &bytes)
            .map_err(|source| CliError::Io { path: path.display().to_string(), source })?,
        None => std::io::stdout()
            .write_all(&bytes)
            .map_err(|source| CliError::Io { path: "<stdout>".into(), source })?,
    }
    Ok(report.passed.unwrap_or(true))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("opaz: {} suite failed", cli.command.name());
            ExitCode::from(EXIT_NUMERICAL as u8)
        }
        Err(e) => {
            eprintln!("opaz: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
