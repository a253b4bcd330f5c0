use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use hcss_cli::{run, Cli, EXIT_INPUT};

fn main() -> ExitCode {
    // clap reports usage errors with status 2, which here means "not
    // certified".
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return ExitCode::from(if err.use_stderr() { EXIT_INPUT } else { 0 });
        }
    };
    let outcome = match run(&cli) {
        Ok(outcome) => outcome,
        Err(err) => {
            eprintln!("error: {err}");
            return ExitCode::from(err.exit_code());
        }
    };
    for warning in &outcome.warnings {
        eprintln!("warning: {warning}");
    }
    let written = match &outcome.out {
        Some(path) => fs::write(path, &outcome.report).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => std::io::stdout()
            .write_all(outcome.report.as_bytes())
            .map_err(|e| format!("cannot write report: {e}")),
    };
    if let Err(message) = written {
        eprintln!("error: {message}");
        return ExitCode::from(EXIT_INPUT);
    }
    if let Some(message) = &outcome.message {
        eprintln!("{message}");
    }
    ExitCode::from(outcome.code)
}
