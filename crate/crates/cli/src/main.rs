use std::io::Write;
use std::process::ExitCode;

use capacitary::args::Cli;
use capacitary::{io, run, CliError};
use clap::Parser;

fn fail(e: &CliError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (outcome, path) = match run(&cli.command) {
        Ok(r) => r,
        Err(e) => return fail(&e),
    };
    if !outcome.text.is_empty() {
        let written = match &path {
            Some(p) => io::write_text(p, &outcome.text),
            None => std::io::stdout()
                .write_all(outcome.text.as_bytes())
                .map_err(|e| CliError::Write {
                    path: "<stdout>".into(),
                    message: e.to_string(),
                }),
        };
        if let Err(e) = written {
            return fail(&e);
        }
    }
    match outcome.status {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&e),
    }
}
