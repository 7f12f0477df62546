use clap::Parser;
use okapain_cli::{run, Cli, EXIT_USAGE};
use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = run(&cli);
    if !outcome.diagnostics.is_empty() {
        eprintln!("{}", outcome.diagnostics.trim_end());
    }
    if !outcome.output.is_empty() {
        let written = match &cli.output {
            Some(path) => std::fs::write(path, &outcome.output).map_err(|e| format!("{}: {}", path.display(), e)),
            None => std::io::stdout().write_all(outcome.output.as_bytes()).map_err(|e| e.to_string()),
        };
        if let Err(e) = written {
            eprintln!("cannot write output: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    ExitCode::from(outcome.code)
}
