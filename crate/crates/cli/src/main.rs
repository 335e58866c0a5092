use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = regeval_cli::Cli::parse();
    match regeval_cli::run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
