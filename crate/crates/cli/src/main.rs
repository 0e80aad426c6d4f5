use std::io;
use std::process::ExitCode;

use clap::Parser;
use gofi_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut stdout = io::stdout().lock();
    match run(&cli.command, &mut stdout) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("gofi: {e}");
            ExitCode::FAILURE
        }
    }
}
