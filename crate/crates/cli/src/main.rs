use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = anece_cli::Cli::parse();
    match anece_cli::run(&cli) {
        Ok(status) => ExitCode::from(status.code()),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
