//! Checks, tolerances and the artifact directory.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::CliError;

/// Default tolerance of every asserted check, keyed by check id.
pub const TOLERANCES: &[(&str, f64)] = &[
    ("madelung.hj-residual", 1e-10),
    ("madelung.continuity", 1e-10),
    ("madelung.quantum-potential", 1e-10),
    ("madelung.normalization", 1e-10),
    ("madelung.hj-slope", 1.9),
    ("madelung.continuity-ratio", 3.6),
    ("madelung.form-gap", 1e-3),
    ("madelung.eigenstate", 5e-4),
    ("madelung.hj-offset", 0.0),
    ("pauli.decomposition", 1.25),
    ("pauli.spin-divergence", 1.25),
    ("pauli.koenig", 1e-10),
    ("pauli.vsq-identity", 1e-10),
    ("pauli.zbw-velocity", 1e-10),
    ("pauli.diffusion", 0.0),
    ("pauli.takabayasi", 1e-12),
    ("helix.mass-constraint", 1e-12),
    ("helix.m1", 1e-12),
    ("helix.projection", 1e-12),
    ("helix.std-impulse", 1e-12),
    ("helix.frame-invariance", 1e-10),
    ("helix.classification", 0.0),
    ("helix.light-like", 1e-10),
    ("helix.scalar-limit", 1e-12),
    ("helix.barut-zanghi", 1e-12),
    ("helix.bz-light-like", 1e-10),
    ("helix.v2-profile", 1e-12),
    ("dirac.gamma", 1e-14),
    ("dirac.gordon", 1e-12),
    ("dirac.conservation", 1e-12),
    ("dirac.footnote", 1e-12),
    ("dirac.spin-term", 0.0),
    ("dirac.rest-frame", 1e-12),
    ("dirac.time-average", 1e-10),
];

#[derive(Debug, Clone, Default)]
pub struct Tolerances {
    overrides: BTreeMap<String, f64>,
}

impl Tolerances {
    pub fn with_overrides(overrides: BTreeMap<String, f64>) -> Result<Self, CliError> {
        for key in overrides.keys() {
            if !TOLERANCES.iter().any(|(k, _)| k == key) {
                return Err(CliError::Usage(format!("unknown tolerance key `{key}`")));
            }
        }
        Ok(Tolerances { overrides })
    }

    pub fn get(&self, id: &str) -> f64 {
        if let Some(v) = self.overrides.get(id) {
            return *v;
        }
        TOLERANCES
            .iter()
            .find(|(k, _)| *k == id)
            .map(|(_, v)| *v)
            .unwrap_or_else(|| panic!("no tolerance registered for {id}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Comparison {
    AtMost,
    AtLeast,
    /// Measured and recorded, never fails the run.
    Report,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub id: String,
    pub relation: String,
    pub value: f64,
    pub tolerance: f64,
    pub comparison: Comparison,
    pub passed: bool,
}

impl Check {
    fn build(id: &str, relation: &str, value: f64, tolerance: f64, comparison: Comparison) -> Check {
        let passed = match comparison {
            Comparison::AtMost => value <= tolerance,
            Comparison::AtLeast => value >= tolerance,
            Comparison::Report => true,
        };
        Check {
            id: id.to_string(),
            relation: relation.to_string(),
            value,
            tolerance,
            comparison,
            passed,
        }
    }

    pub fn at_most(id: &str, relation: &str, value: f64, tolerance: f64) -> Check {
        Check::build(id, relation, value, tolerance, Comparison::AtMost)
    }

    pub fn at_least(id: &str, relation: &str, value: f64, tolerance: f64) -> Check {
        Check::build(id, relation, value, tolerance, Comparison::AtLeast)
    }

    pub fn report(id: &str, relation: &str, value: f64, tolerance: f64) -> Check {
        Check::build(id, relation, value, tolerance, Comparison::Report)
    }

    pub fn line(&self) -> String {
        let verdict = match (self.comparison, self.passed) {
            (Comparison::Report, _) => "INFO",
            (_, true) => "PASS",
            (_, false) => "FAIL",
        };
        let op = match self.comparison {
            Comparison::AtMost => "<=",
            Comparison::AtLeast => ">=",
            Comparison::Report => "vs",
        };
        format!(
            "{verdict} {} {:e} {op} {:e} ({})",
            self.id, self.value, self.tolerance, self.relation
        )
    }
}

/// Collects checks for one command, looking tolerances up by id.
#[derive(Debug)]
pub struct Checklist<'a> {
    tol: &'a Tolerances,
    pub checks: Vec<Check>,
}

impl<'a> Checklist<'a> {
    pub fn new(tol: &'a Tolerances) -> Self {
        Checklist {
            tol,
            checks: Vec::new(),
        }
    }

    pub fn tolerance(&self, id: &str) -> f64 {
        self.tol.get(id)
    }

    pub fn at_most(&mut self, id: &str, relation: &str, value: f64) {
        let t = self.tol.get(id);
        self.checks.push(Check::at_most(id, relation, value, t));
    }

    pub fn at_most_bound(&mut self, id: &str, relation: &str, value: f64, bound: f64) {
        self.checks.push(Check::at_most(id, relation, value, bound));
    }

    pub fn at_least(&mut self, id: &str, relation: &str, value: f64) {
        let t = self.tol.get(id);
        self.checks.push(Check::at_least(id, relation, value, t));
    }

    pub fn report(&mut self, id: &str, relation: &str, value: f64) {
        let t = self.tol.get(id);
        self.checks.push(Check::report(id, relation, value, t));
    }

    /// Recorded next to the value it is expected to approach.
    pub fn report_against(&mut self, id: &str, relation: &str, value: f64, reference: f64) {
        self.checks.push(Check::report(id, relation, value, reference));
    }

    /// Asserted `<=` when `asserted`, otherwise recorded only.
    pub fn at_most_if(&mut self, asserted: bool, id: &str, relation: &str, value: f64) {
        if asserted {
            self.at_most(id, relation, value);
        } else {
            self.report(id, relation, value);
        }
    }

    pub fn into_checks(self) -> Vec<Check> {
        self.checks
    }
}

/// Output directory that remembers what was written, for the manifest.
#[derive(Debug)]
pub struct OutDir {
    root: PathBuf,
    prefix: String,
    files: Vec<String>,
}

impl OutDir {
    pub fn create(root: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(root)?;
        Ok(OutDir {
            root: root.to_path_buf(),
            prefix: String::new(),
            files: Vec::new(),
        })
    }

    /// A subdirectory whose files are recorded relative to the parent root.
    pub fn child(&self, name: &str) -> Result<OutDir, CliError> {
        fs::create_dir_all(self.root.join(name))?;
        Ok(OutDir {
            root: self.root.join(name),
            prefix: format!("{}{name}/", self.prefix),
            files: Vec::new(),
        })
    }

    pub fn absorb(&mut self, child: OutDir) {
        self.files.extend(child.files);
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn files(&self) -> &[String] {
        &self.files
    }

    pub fn write_with(
        &mut self,
        name: &str,
        f: impl FnOnce(&mut BufWriter<File>) -> Result<(), CliError>,
    ) -> Result<(), CliError> {
        let mut w = BufWriter::new(File::create(self.root.join(name))?);
        f(&mut w)?;
        w.flush()?;
        self.files.push(format!("{}{name}", self.prefix));
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        self.write_with(name, |w| {
            serde_json::to_writer_pretty(&mut *w, value)?;
            writeln!(w)?;
            Ok(())
        })
    }
}

#[derive(Debug, Serialize)]
pub struct Manifest<'a, P: Serialize> {
    pub command: &'a str,
    pub constants: zbw_core::Constants,
    pub seed: u64,
    pub parameters: &'a P,
    pub artifacts: Vec<String>,
    pub passed: bool,
    pub checks: &'a [Check],
}

pub fn all_passed(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.passed)
}
