use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = tcpm_cli::Cli::parse();
    match tcpm_cli::execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
