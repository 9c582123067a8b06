use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use sqfree_cli::{run, Cli, CliError, EXIT_CHECK_FAILED};

fn write_output(cli: &Cli, text: &str) -> Result<(), CliError> {
    match &cli.command.run_args().out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    let result = run(&cli).and_then(|out| write_output(&cli, &out.text).map(|_| out.checks_passed));
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("sqfree: report written, but a consistency check failed");
            ExitCode::from(EXIT_CHECK_FAILED as u8)
        }
        Err(e) => {
            eprintln!("sqfree: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
