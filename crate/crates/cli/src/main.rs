use std::process::ExitCode;

use clap::Parser;
use decmon_cli::{run, Cli, EXIT_ERROR};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut stdout = std::io::stdout().lock();
    match run(&cli, &mut stdout) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("decmon: {e}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
