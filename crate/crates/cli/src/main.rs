use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use colortree::cli::Cli;
use colortree::commands::{execute, init_threads};

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_threads(cli.threads);
    match execute(&cli) {
        Ok(printed) => {
            let _ = std::io::stdout().write_all(&printed.stdout);
            let _ = std::io::stderr().write_all(&printed.stderr);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
