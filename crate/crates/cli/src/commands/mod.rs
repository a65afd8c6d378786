pub mod dirac;
pub mod helix;
pub mod madelung;
pub mod pauli;
pub mod suite;

use serde::Serialize;

use crate::report::{all_passed, Check, Manifest, OutDir};
use crate::{CliError, Context, Outcome};

pub(crate) fn write_manifest<P: Serialize>(
    ctx: &Context,
    out: &mut OutDir,
    command: &str,
    parameters: &P,
    checks: &[Check],
) -> Result<(), CliError> {
    let manifest = Manifest {
        command,
        constants: ctx.constants,
        seed: ctx.seed,
        parameters,
        artifacts: out.files().to_vec(),
        passed: all_passed(checks),
        checks,
    };
    out.write_json("manifest.json", &manifest)
}

/// Writes the manifest for a single-module run and packages the checks.
pub(crate) fn finish<P: Serialize>(
    ctx: &Context,
    mut out: OutDir,
    command: &str,
    parameters: &P,
    checks: Vec<Check>,
) -> Result<Outcome, CliError> {
    write_manifest(ctx, &mut out, command, parameters, &checks)?;
    Ok(Outcome {
        checks,
        stdout_json: None,
    })
}

pub(crate) fn positive(name: &str, v: f64) -> Result<f64, CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Usage(format!("--{name} must be positive, got {v}")))
    }
}

pub(crate) fn finite(name: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Usage(format!("--{name} must be finite")))
    }
}
