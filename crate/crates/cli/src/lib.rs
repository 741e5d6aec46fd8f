//! Command-line driver for [`cba33`]: file formats, verification suites and
//! versioned reports.
//!
//! [`run`] does everything the binary does except printing, which keeps the
//! whole surface testable in-process.
//!
//! Exit statuses: 0 every mandatory check passed, 1 some check failed,
//! 2 input error, 3 aborted on a numerical degeneracy.

pub mod commands;
pub mod config;
pub mod error;
pub mod input;
pub mod report;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use cba33::linalg::C64;
use clap::{Args, Parser, Subcommand};
use serde_json::Value;

use crate::commands::catalog::Sweep;
use crate::commands::Body;
use crate::config::{Expectation, Format, ModelSource, Suite, SuiteConfig};
use crate::error::{exit, CliError};
use crate::input::{read_model, resolve, Model};
use crate::report::{ErrorInfo, Report, Status, REPORT_VERSION};

#[derive(Debug, Parser)]
#[command(name = "cba33", version, about = "Checks for 3-state, 33-vertex chain Hamiltonians")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Debug, Args)]
pub struct Options {
    /// Seed for every random draw.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Relative tolerance for Yang-Baxter and commutation checks.
    #[arg(long = "tol-ybe", global = true)]
    pub tol_ybe: Option<f64>,
    /// Distance allowed when pairing predicted and exact eigenvalues.
    #[arg(long = "tol-eigen", global = true)]
    pub tol_eigen: Option<f64>,
    /// Chain length.
    #[arg(long = "L", global = true)]
    pub len: Option<usize>,
    /// Particle number.
    #[arg(long = "M", global = true)]
    pub particles: Option<usize>,
    /// Random draws per randomized check.
    #[arg(long, global = true)]
    pub draws: Option<usize>,
    /// Hecke branch for catalog specs: 0+, 0-, 1+ or 1-.
    #[arg(long, global = true)]
    pub branch: Option<String>,
    /// Also write the structured report to this file.
    #[arg(long, global = true)]
    pub report: Option<PathBuf>,
    /// Output format [default: text].
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Start from a saved configuration (flags override it).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the entry pattern and the solvability constraints.
    Validate { model: Option<PathBuf> },
    /// Classify T into the Hecke, Tn or Sn case.
    Classify { model: Option<PathBuf> },
    /// Run verification suites.
    Verify {
        model: Option<PathBuf>,
        /// Suite to run [default: all].
        #[arg(long, value_enum)]
        suite: Option<Suite>,
        /// Expected Reshetikhin verdict; `report` makes it informational.
        #[arg(long, value_enum)]
        expect: Option<Expectation>,
    },
    /// List, instantiate or sweep catalog families.
    #[command(subcommand)]
    Catalog(CatalogCommand),
    /// Exact spectrum of the (L, M) sector.
    Spectrum { model: Option<PathBuf> },
    /// Bethe roots for M = 1 or 2, checked against the exact sector.
    Bethe { model: Option<PathBuf> },
    /// The Reshetikhin criterion.
    Reshetikhin {
        model: Option<PathBuf>,
        #[arg(long, value_enum)]
        expect: Option<Expectation>,
    },
}

#[derive(Debug, Subcommand)]
pub enum CatalogCommand {
    /// Every family with its case and parameter schema.
    List,
    /// Evaluate one catalog spec.
    Instantiate { spec: Option<PathBuf> },
    /// Yang-Baxter residuals along a line in one complex parameter.
    Sweep {
        spec: Option<PathBuf>,
        #[arg(long)]
        param: String,
        /// `re` or `re,im`.
        #[arg(long, value_parser = parse_complex)]
        from: C64,
        #[arg(long, value_parser = parse_complex)]
        to: C64,
        #[arg(long, default_value_t = 8)]
        points: usize,
    },
}

fn parse_complex(s: &str) -> Result<C64, String> {
    let parts: Vec<&str> = s.split(',').collect();
    let num = |p: &str| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}"));
    match parts.as_slice() {
        [re] => Ok(C64::new(num(re)?, 0.0)),
        [re, im] => Ok(C64::new(num(re)?, num(im)?)),
        _ => Err(format!("expected re or re,im, got {s:?}")),
    }
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "validate",
            Command::Classify { .. } => "classify",
            Command::Verify { .. } => "verify",
            Command::Catalog(CatalogCommand::List) => "catalog list",
            Command::Catalog(CatalogCommand::Instantiate { .. }) => "catalog instantiate",
            Command::Catalog(CatalogCommand::Sweep { .. }) => "catalog sweep",
            Command::Spectrum { .. } => "spectrum",
            Command::Bethe { .. } => "bethe",
            Command::Reshetikhin { .. } => "reshetikhin",
        }
    }

    fn model_path(&self) -> Option<&Path> {
        match self {
            Command::Validate { model }
            | Command::Classify { model }
            | Command::Verify { model, .. }
            | Command::Spectrum { model }
            | Command::Bethe { model }
            | Command::Reshetikhin { model, .. } => model.as_deref(),
            Command::Catalog(CatalogCommand::Instantiate { spec } | CatalogCommand::Sweep { spec, .. }) => {
                spec.as_deref()
            }
            Command::Catalog(CatalogCommand::List) => None,
        }
    }

    fn needs_model(&self) -> bool {
        !matches!(self, Command::Catalog(CatalogCommand::List))
    }
}

/// What a run produced: the exit status, the text for stdout and the report.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub report: Option<Report>,
}

/// Parse `args` (including the program name) and run.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(&cli),
        Err(e) => Outcome {
            code: if e.use_stderr() { exit::INPUT_ERROR } else { exit::PASS },
            stdout: e.render().to_string(),
            report: None,
        },
    }
}

/// The config a run uses: defaults or `--config`, then flags, then the model.
pub fn build_config(cli: &Cli) -> Result<SuiteConfig, CliError> {
    let mut cfg = flag_config(cli)?;
    attach_model(cli, &mut cfg)?;
    Ok(cfg)
}

/// Defaults or `--config`, then flags; the model is not read yet.
pub fn flag_config(cli: &Cli) -> Result<SuiteConfig, CliError> {
    let o = &cli.opts;
    let mut cfg = match &o.config {
        Some(path) => {
            let text =
                std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            serde_json::from_str(&text).map_err(|e| {
                CliError::Input(format!(
                    "{}: line {}, column {}: {e}",
                    path.display(),
                    e.line(),
                    e.column()
                ))
            })?
        }
        None => SuiteConfig::default(),
    };
    if let Some(s) = o.seed {
        cfg.seed = s;
    }
    if let Some(t) = o.tol_ybe {
        cfg.tolerances.ybe = t;
    }
    if let Some(t) = o.tol_eigen {
        cfg.tolerances.eigen = t;
    }
    if let Some(l) = o.len {
        cfg.len = l;
    }
    if let Some(m) = o.particles {
        cfg.particles = m;
    }
    if let Some(d) = o.draws {
        cfg.draws = d;
    }
    if let Some(b) = &o.branch {
        cfg.branch = Some(b.clone());
    }
    match &cli.command {
        Command::Verify { suite, expect, .. } => {
            if suite.is_some() || cfg.suite.is_none() {
                cfg.suite = Some(suite.unwrap_or(Suite::All));
            }
            if let Some(e) = expect {
                cfg.reshetikhin_expect = *e;
            }
        }
        Command::Reshetikhin { expect: Some(e), .. } => cfg.reshetikhin_expect = *e,
        _ => {}
    }
    Ok(cfg)
}

/// Replace a file source (from the command line or the config) by its
/// contents. On failure the config keeps the path that was tried.
pub fn attach_model(cli: &Cli, cfg: &mut SuiteConfig) -> Result<(), CliError> {
    if let Some(path) = cli.command.model_path() {
        cfg.model = Some(ModelSource::File {
            path: path.to_string_lossy().into_owned(),
        });
    }
    if let Some(ModelSource::File { path }) = &cfg.model {
        cfg.model = Some(read_model(Path::new(path))?);
    }
    if cli.command.needs_model() && cfg.model.is_none() {
        return Err(CliError::Input(
            "no model given (pass a file or a config with a model)".into(),
        ));
    }
    Ok(())
}

fn load(cfg: &SuiteConfig) -> Result<Model, CliError> {
    let source = cfg.model.as_ref().expect("checked by build_config");
    resolve(source, cfg.branch.as_deref())
}

fn dispatch(command: &Command, cfg: &SuiteConfig) -> Result<Body, CliError> {
    match command {
        Command::Catalog(CatalogCommand::List) => Ok(commands::catalog::list()),
        Command::Catalog(CatalogCommand::Sweep {
            param,
            from,
            to,
            points,
            ..
        }) => {
            let Some(ModelSource::Catalog { spec }) = &cfg.model else {
                return Err(CliError::Input("catalog sweep needs a catalog spec".into()));
            };
            let sw = Sweep {
                param: param.clone(),
                from: *from,
                to: *to,
                points: *points,
            };
            commands::catalog::sweep(spec, &sw, cfg)
        }
        Command::Catalog(CatalogCommand::Instantiate { .. }) => commands::catalog::instantiate(&load(cfg)?),
        Command::Validate { .. } => commands::validate::run(&load(cfg)?),
        Command::Classify { .. } => commands::classify::run(&load(cfg)?, cfg),
        Command::Verify { .. } => commands::verify::run(&load(cfg)?, cfg),
        Command::Spectrum { .. } => commands::spectrum::run(&load(cfg)?, cfg),
        Command::Bethe { .. } => commands::bethe::run(&load(cfg)?, cfg),
        Command::Reshetikhin { .. } => commands::reshetikhin::run(&load(cfg)?, cfg),
    }
}

/// Assemble the report for a finished (or failed) command.
pub fn make_report(command: &str, cfg: SuiteConfig, result: Result<Body, CliError>) -> Report {
    match result {
        Ok(body) => {
            let passed = body.checks.iter().all(|c| c.passed || !c.mandatory);
            Report {
                report_version: REPORT_VERSION,
                command: command.to_string(),
                status: if passed { Status::Pass } else { Status::Fail },
                exit_code: if passed { exit::PASS } else { exit::CHECK_FAILED },
                config: cfg,
                checks: body.checks,
                data: if body.data.is_empty() {
                    Value::Null
                } else {
                    Value::Object(body.data)
                },
                notes: body.notes,
                error: None,
            }
        }
        Err(e) => Report {
            report_version: REPORT_VERSION,
            command: command.to_string(),
            status: Status::Error,
            exit_code: e.exit_code(),
            config: cfg,
            checks: vec![],
            data: Value::Null,
            notes: vec![],
            error: Some(ErrorInfo {
                kind: e.kind(),
                message: e.to_string(),
            }),
        },
    }
}

pub fn execute(cli: &Cli) -> Outcome {
    let name = cli.command.name();
    let report = match flag_config(cli) {
        Ok(mut cfg) => match attach_model(cli, &mut cfg) {
            Ok(()) => {
                let result = dispatch(&cli.command, &cfg);
                make_report(name, cfg, result)
            }
            Err(e) => make_report(name, cfg, Err(e)),
        },
        Err(e) => make_report(name, SuiteConfig::default(), Err(e)),
    };
    let mut code = report.exit_code;
    let mut stdout = match cli.opts.format.unwrap_or(Format::Text) {
        Format::Text => report.to_text(),
        Format::Structured => report.to_structured(),
    };
    if let Some(path) = &cli.opts.report {
        if let Err(e) = std::fs::write(path, report.to_structured()) {
            stdout.push_str(&format!("cannot write report to {}: {e}\n", path.display()));
            code = exit::INPUT_ERROR;
        }
    }
    Outcome {
        code,
        stdout,
        report: Some(report),
    }
}


#[cfg(doctest)]
#[doc = include_str!("../../../book/src/cli.md")]
mod book_cli {}
