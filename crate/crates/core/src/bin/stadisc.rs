use clap::Parser;
use stadisc::cli::{render, run, Cli};
use std::process::ExitCode;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            // usage errors are errors, not negative verdicts
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    let manifest = match cli.into_manifest() {
        Ok(m) => m,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let report = run(&manifest);
    let text = render(&report, manifest.options.format);
    match &manifest.options.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("error: {}: {e}", path.display());
                return ExitCode::from(1);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(report.status.code() as u8)
}
