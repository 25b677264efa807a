//! Manifests, reports and command implementations behind the `stadisc`
//! binary. Every command returns a [`Report`] whose status maps to the exit
//! code: 0 certified, 2 negative verdict, 1 error.

mod args;
mod commands;
mod fixtures;
mod report;

pub use args::{parse_complex_list, parse_real_list, Cli, CliCommand, CommandKind, Format, Options, RunManifest};
pub use commands::SolveManifest;
pub use fixtures::{fixture, FIXTURES};
pub use report::{ExitStatus, Record, Report};

use crate::model::{load_model, parse_model, HermitianModel};
use std::path::Path;

/// Loads a model file, or a bundled fixture when the path is `@name`.
pub fn resolve_model(path: &Path) -> Result<HermitianModel, String> {
    let text = path.to_string_lossy();
    if let Some(name) = text.strip_prefix('@') {
        let body = fixture(name).ok_or_else(|| format!("unknown fixture {name:?}"))?;
        return parse_model(body).map_err(|e| e.to_string());
    }
    load_model(path).map_err(|e| e.to_string())
}

/// Runs one manifest. Errors become an `error` record with status 1.
pub fn run(manifest: &RunManifest) -> Report {
    let mut report = Report::new();
    let o = &manifest.options;
    report.push(
        Record::new("run")
            .with("command", manifest.command)
            .with("model", manifest.model_path.as_ref().map(|p| p.to_string_lossy().into_owned()))
            .with("seed", o.seed)
            .with("tol", o.tol),
    );
    if let Err(e) = manifest.validate() {
        report.push(Record::new("error").with("message", e));
        report.settle(ExitStatus::Error);
        return report;
    }
    let outcome = match manifest.command {
        CommandKind::Classify => commands::classify(manifest, &mut report),
        CommandKind::Disc => commands::disc(manifest, &mut report),
        CommandKind::Defect => commands::defect(manifest, &mut report),
        CommandKind::Kernel => commands::kernel(manifest, &mut report),
        CommandKind::Jets => commands::jets(manifest, &mut report),
        CommandKind::Solve => commands::solve(manifest, &mut report),
        CommandKind::Probe => commands::probe(manifest, &mut report),
        CommandKind::Selftest => commands::selftest(manifest, &mut report),
    };
    if let Err(e) = outcome {
        report.push(Record::new("error").with("message", e));
        report.settle(ExitStatus::Error);
    }
    report
}

/// Renders a report in the requested format.
pub fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Text => report.to_text(),
        Format::Structured => report.to_structured(),
    }
}
