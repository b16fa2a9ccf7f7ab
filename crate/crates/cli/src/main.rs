use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = adsheat_cli::Cli::parse();
    ExitCode::from(adsheat_cli::run(&cli))
}
