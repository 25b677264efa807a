use crate::linalg::C64;
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::path::PathBuf;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Text,
    Structured,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CommandKind {
    Classify,
    Disc,
    Defect,
    Kernel,
    Jets,
    Solve,
    Probe,
    Selftest,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Options {
    pub seed: u64,
    pub tol: f64,
    pub deg: Option<usize>,
    pub order: usize,
    pub v: Option<Vec<C64>>,
    pub c: Option<Vec<f64>>,
    pub theta_max: f64,
    pub format: Format,
    pub out: Option<PathBuf>,
    /// Lifted-disc file read by `disc` and `defect`.
    pub disc: Option<PathBuf>,
    /// Where `disc` and `solve` write serialized lifts.
    pub lift_out: Option<PathBuf>,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            seed: 0,
            tol: 1e-9,
            deg: None,
            order: 1,
            v: None,
            c: None,
            theta_max: 0.1,
            format: Format::Text,
            out: None,
            disc: None,
            lift_out: None,
        }
    }
}

/// A fully parsed invocation. `model_path` is a file, a directory (for
/// `classify`), a solve manifest (for `solve`) or `@name` for a bundled
/// fixture.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub command: CommandKind,
    pub model_path: Option<PathBuf>,
    pub options: Options,
}

impl RunManifest {
    pub fn new(command: CommandKind, model_path: Option<&str>) -> Self {
        RunManifest { command, model_path: model_path.map(PathBuf::from), options: Options::default() }
    }

    pub fn validate(&self) -> Result<(), String> {
        let o = &self.options;
        if self.command != CommandKind::Selftest && self.model_path.is_none() {
            return Err(format!("{:?} needs a model path", self.command).to_lowercase());
        }
        if !(1..=2).contains(&o.order) {
            return Err(format!("--order must be 1 or 2, got {}", o.order));
        }
        if !(o.tol > 0.0 && o.tol < 1.0) {
            return Err(format!("--tol must lie in (0, 1), got {}", o.tol));
        }
        if !(o.theta_max > 0.0 && o.theta_max < std::f64::consts::PI) {
            return Err(format!("--theta-max must lie in (0, π), got {}", o.theta_max));
        }
        if let Some(d) = o.deg {
            if d == 0 || d > 64 {
                return Err(format!("--deg must lie in 1..=64, got {d}"));
            }
            if self.command == CommandKind::Solve && d < 2 {
                return Err("solve needs --deg >= 2".into());
            }
        }
        Ok(())
    }
}

#[derive(Debug, Parser)]
#[command(name = "stadisc", version, about = "Stationary discs attached to quadric CR submanifolds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
    /// Seed for the randomized certificate searches.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Relative singular-value threshold for rank decisions.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    /// Polynomial degree (kernel ansatz or solved discs).
    #[arg(long, global = true)]
    pub deg: Option<usize>,
    /// Jet order for `jets`.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub order: u8,
    /// Direction V as a comma-separated complex list, e.g. "1, i" or "1+2i, -0.5".
    #[arg(long = "V", global = true, allow_hyphen_values = true)]
    pub v: Option<String>,
    /// Covector c as a comma-separated real list.
    #[arg(long = "c", global = true, allow_hyphen_values = true)]
    pub c: Option<String>,
    #[arg(long, global = true, default_value_t = 0.1)]
    pub theta_max: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Lifted disc to verify instead of the canonical one.
    #[arg(long, global = true)]
    pub disc: Option<PathBuf>,
    /// Write solved or constructed lifts here.
    #[arg(long, global = true)]
    pub lift_out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Nondegeneracy conditions (a), (b), (t), (d), (f) of a model file or every model in a directory.
    Classify { path: PathBuf },
    /// Canonical stationary lift and its residuals.
    Disc { model: PathBuf },
    /// Defect of the canonical disc (or of --disc).
    Defect { model: PathBuf },
    /// Tangent kernel of the linearized boundary problem.
    Kernel { model: PathBuf },
    /// Jet-injectivity certificate of order --order.
    Jets { model: PathBuf },
    /// Newton continuation from a model file or solve manifest.
    Solve { path: PathBuf },
    /// Conormal coverage probe.
    Probe { model: PathBuf },
    /// Invariant suite on the bundled fixtures.
    Selftest,
}

impl Cli {
    pub fn into_manifest(self) -> Result<RunManifest, String> {
        let (command, model_path) = match self.command {
            CliCommand::Classify { path } => (CommandKind::Classify, Some(path)),
            CliCommand::Disc { model } => (CommandKind::Disc, Some(model)),
            CliCommand::Defect { model } => (CommandKind::Defect, Some(model)),
            CliCommand::Kernel { model } => (CommandKind::Kernel, Some(model)),
            CliCommand::Jets { model } => (CommandKind::Jets, Some(model)),
            CliCommand::Solve { path } => (CommandKind::Solve, Some(path)),
            CliCommand::Probe { model } => (CommandKind::Probe, Some(model)),
            CliCommand::Selftest => (CommandKind::Selftest, None),
        };
        let manifest = RunManifest {
            command,
            model_path,
            options: Options {
                seed: self.seed,
                tol: self.tol,
                deg: self.deg,
                order: self.order as usize,
                v: self.v.as_deref().map(parse_complex_list).transpose()?,
                c: self.c.as_deref().map(parse_real_list).transpose()?,
                theta_max: self.theta_max,
                format: self.format,
                out: self.out,
                disc: self.disc,
                lift_out: self.lift_out,
            },
        };
        manifest.validate()?;
        Ok(manifest)
    }
}

fn tokens(text: &str) -> impl Iterator<Item = &str> {
    text.trim().trim_start_matches(['(', '[']).trim_end_matches([')', ']']).split(',').map(str::trim)
}

pub fn parse_complex_list(text: &str) -> Result<Vec<C64>, String> {
    tokens(text)
        .map(|t| C64::from_str(&t.replace(' ', "")).map_err(|_| format!("cannot parse complex number {t:?}")))
        .collect()
}

pub fn parse_real_list(text: &str) -> Result<Vec<f64>, String> {
    tokens(text).map(|t| t.parse::<f64>().map_err(|_| format!("cannot parse real number {t:?}"))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_lists() {
        let v = parse_complex_list("1, i").unwrap();
        assert_eq!(v, vec![C64::new(1.0, 0.0), C64::new(0.0, 1.0)]);
        let v = parse_complex_list("(1+2i, -0.5, -i)").unwrap();
        assert_eq!(v, vec![C64::new(1.0, 2.0), C64::new(-0.5, 0.0), C64::new(0.0, -1.0)]);
        assert!(parse_complex_list("1, x").is_err());
        assert_eq!(parse_real_list("1,1,0").unwrap(), vec![1.0, 1.0, 0.0]);
    }

    #[test]
    fn manifest_from_flags() {
        let cli = Cli::try_parse_from(["stadisc", "jets", "@q2", "--order", "2", "--V", "1,1,1", "--c", "1,1"]).unwrap();
        let m = cli.into_manifest().unwrap();
        assert_eq!(m.command, CommandKind::Jets);
        assert_eq!(m.options.order, 2);
        assert_eq!(m.options.c, Some(vec![1.0, 1.0]));
        assert!(Cli::try_parse_from(["stadisc", "jets", "@q2", "--order", "3"]).is_err());
    }
}
