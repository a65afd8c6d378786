//! `zbw` command-line driver.
//!
//! Exit status: 0 when every asserted check passes, 1 when any fails, 2 on a
//! usage, configuration or runtime error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::Parser;
use thiserror::Error;
use zbw_core::Constants;

pub mod args;
pub mod commands;
pub mod report;
pub mod settings;

use args::{Cli, Command};
use report::{Check, Tolerances};
use settings::Settings;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] zbw_core::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

/// Resolved options shared by every subcommand.
#[derive(Debug)]
pub struct Context {
    pub constants: Constants,
    pub seed: u64,
    pub out: PathBuf,
    pub tolerances: Tolerances,
    pub settings: Settings,
}

impl Context {
    pub fn resolve(common: &args::CommonArgs) -> Result<Self, CliError> {
        let settings = Settings::load(common.config.as_deref())?;
        let constants = Constants {
            hbar: settings.pick("hbar", common.hbar, 1.0)?,
            mass: settings.pick("mass", common.mass, 1.0)?,
            charge: settings.pick("charge", common.charge, -1.0)?,
        };
        constants.validate()?;
        let seed = settings.pick("seed", common.seed, 7)?;
        let out = settings.pick("out", common.out.clone(), PathBuf::from("zbw-out"))?;
        let tolerances = Tolerances::with_overrides(settings.tolerances(&common.tol)?)?;
        Ok(Context {
            constants,
            seed,
            out,
            tolerances,
            settings,
        })
    }
}

/// What a subcommand hands back for printing.
#[derive(Debug, Default)]
pub struct Outcome {
    pub checks: Vec<Check>,
    /// Printed on stdout instead of the check lines.
    pub stdout_json: Option<String>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        report::all_passed(&self.checks)
    }
}

fn dispatch(cli: &Cli) -> Result<Outcome, CliError> {
    let ctx = Context::resolve(&cli.common)?;
    match &cli.command {
        Command::Madelung(a) => commands::madelung::command(&ctx, a),
        Command::Pauli(a) => commands::pauli::command(&ctx, a),
        Command::Helix(a) => commands::helix::command(&ctx, a),
        Command::Dirac(a) => commands::dirac::command(&ctx, a),
        Command::Suite(a) => commands::suite::command(&ctx, a),
    }
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
        }
    };
    match dispatch(&cli) {
        Ok(outcome) => {
            let stdout = std::io::stdout();
            let stderr = std::io::stderr();
            let mut lines: Box<dyn Write> = if outcome.stdout_json.is_some() {
                Box::new(stderr.lock())
            } else {
                Box::new(stdout.lock())
            };
            for c in &outcome.checks {
                let _ = writeln!(lines, "{}", c.line());
            }
            drop(lines);
            if let Some(json) = &outcome.stdout_json {
                let _ = writeln!(stdout.lock(), "{json}");
            }
            if outcome.passed() {
                EXIT_PASS
            } else {
                for c in outcome.checks.iter().filter(|c| !c.passed) {
                    eprintln!("failed: {}", c.id);
                }
                EXIT_FAIL
            }
        }
        Err(e) => {
            eprintln!("zbw: {e}");
            EXIT_USAGE
        }
    }
}
