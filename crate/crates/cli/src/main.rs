use std::process::ExitCode;

use clap::Parser;
use tautrank_cli::{emit, init_threads, run, Cli, EXIT_ERROR};

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_threads();
    let outcome = run(&cli);
    if let Some(err) = outcome.report.get("error").and_then(|e| e.as_str()) {
        eprintln!("tautrank: {err}");
    }
    if let Err(e) = emit(&outcome, cli.output.as_ref()) {
        eprintln!("tautrank: cannot write report: {e}");
        return ExitCode::from(EXIT_ERROR as u8);
    }
    ExitCode::from(outcome.code as u8)
}
