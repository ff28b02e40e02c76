mod commands;
mod options;

use std::process::ExitCode;

/// Why a run stopped early; each kind has its own exit status.
#[derive(Debug)]
pub enum Failure {
    /// Help or version text requested.
    Info(String),
    Usage(String),
    Compute(String),
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let outcome = options::parse(&argv).and_then(commands::run);
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Info(text)) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(text)) => {
            eprintln!("{}", text.trim_end());
            ExitCode::from(2)
        }
        Err(Failure::Compute(text)) => {
            eprintln!("error: {text}");
            ExitCode::from(1)
        }
    }
}
