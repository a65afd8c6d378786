//! Flat `key = value` configuration files and value resolution.
//!
//! Precedence is flag > environment > file > default. Flags and environment
//! variables are merged by clap before they reach [`Settings::pick`].

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::CliError;

/// Every key a configuration file may set, besides `tol.<check-id>`.
pub const KNOWN_KEYS: &[&str] = &[
    "hbar",
    "mass",
    "charge",
    "out",
    "seed",
    "preset",
    "grid",
    "refine",
    "perturb-E",
    "omega",
    "momentum",
    "sigma",
    "state",
    "spin-scale",
    "boost",
    "R",
    "omega-ratio",
    "phase",
    "bz-check",
    "modulation",
    "modulation-rate",
    "samples",
    "t-max",
    "waves",
    "max-speed",
    "rest-frame",
    "footnote-samples",
    "json",
];

#[derive(Debug, Clone, Default)]
pub struct Settings {
    values: BTreeMap<String, String>,
    tolerances: BTreeMap<String, f64>,
    source: Option<PathBuf>,
}

impl Settings {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        match path {
            None => Ok(Settings::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", p.display())))?;
                let mut s = Settings::parse(&text)?;
                s.source = Some(p.to_path_buf());
                Ok(s)
            }
        }
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        let mut tolerances = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("config line {}: expected key = value", n + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            if let Some(id) = k.strip_prefix("tol.") {
                let t = v
                    .parse::<f64>()
                    .map_err(|_| CliError::Usage(format!("config line {}: bad tolerance `{v}`", n + 1)))?;
                tolerances.insert(id.to_string(), t);
            } else if KNOWN_KEYS.contains(&k) {
                values.insert(k.to_string(), v.to_string());
            } else {
                return Err(CliError::Usage(format!("config line {}: unknown key `{k}`", n + 1)));
            }
        }
        Ok(Settings {
            values,
            tolerances,
            source: None,
        })
    }

    pub fn source(&self) -> Option<&Path> {
        self.source.as_deref()
    }

    /// Flag or environment value if given, else the file value, else `default`.
    pub fn pick<T>(&self, key: &str, given: Option<T>, default: T) -> Result<T, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        Ok(self.pick_opt(key, given)?.unwrap_or(default))
    }

    pub fn pick_opt<T>(&self, key: &str, given: Option<T>) -> Result<Option<T>, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        debug_assert!(KNOWN_KEYS.contains(&key), "unregistered key {key}");
        if given.is_some() {
            return Ok(given);
        }
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<T>()
                .map(Some)
                .map_err(|e| CliError::Usage(format!("config key `{key}`: {e}"))),
        }
    }

    /// File tolerances overlaid by `id=value` pairs from flags or environment.
    pub fn tolerances(&self, given: &[String]) -> Result<BTreeMap<String, f64>, CliError> {
        let mut out = self.tolerances.clone();
        for item in given {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("--tol expects CHECK=VALUE, got `{item}`")))?;
            let t = v
                .trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("--tol {k}: bad value `{v}`")))?;
            out.insert(k.trim().to_string(), t);
        }
        Ok(out)
    }
}
