use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use entroof_cli::{exit, run, Cli, RunSettings};

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(exit::INVALID_PARAMETERS as u8),
            };
        }
    };
    match run(&cli, &argv[1..], RunSettings::default()) {
        Ok(outcome) => {
            let text = outcome.report.render();
            println!("{text}");
            if let Some(path) = &outcome.out {
                if let Err(e) = std::fs::write(path, format!("{text}\n")) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(exit::INTERNAL as u8);
                }
            }
            ExitCode::from(outcome.code as u8)
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.code as u8)
        }
    }
}
