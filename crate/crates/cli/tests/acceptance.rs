//! Acceptance gate: runs `zbw suite` twice with the default seed, checks every
//! criterion against its stated tolerance and prints one line per criterion.
//! Exits non-zero when any criterion fails.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_zbw");

struct Entry {
    run: String,
    id: String,
    relation: String,
    value: f64,
    tolerance: f64,
}

struct Summary(Vec<Entry>);

impl Summary {
    fn load(dir: &Path) -> Summary {
        let text = fs::read_to_string(dir.join("suite_summary.json")).expect("suite_summary.json");
        let json: Value = serde_json::from_str(&text).expect("summary is JSON");
        let entries = json["checks"]
            .as_array()
            .expect("checks array")
            .iter()
            .map(|c| Entry {
                run: c["run"].as_str().unwrap_or_default().to_string(),
                id: c["id"].as_str().unwrap_or_default().to_string(),
                relation: c["relation"].as_str().unwrap_or_default().to_string(),
                value: c["value"].as_f64().unwrap_or(f64::NAN),
                tolerance: c["tolerance"].as_f64().unwrap_or(f64::NAN),
            })
            .collect();
        Summary(entries)
    }

    fn values(&self, id: &str, filter: impl Fn(&Entry) -> bool) -> Vec<f64> {
        self.0
            .iter()
            .filter(|e| e.id == id && filter(e))
            .map(|e| e.value)
            .collect()
    }

    /// Largest value of `id`, NaN when the suite produced none.
    fn max(&self, id: &str) -> f64 {
        self.max_where(id, |_| true)
    }

    fn max_where(&self, id: &str, filter: impl Fn(&Entry) -> bool) -> f64 {
        let v = self.values(id, filter);
        if v.is_empty() {
            f64::NAN
        } else {
            v.into_iter().fold(f64::NEG_INFINITY, f64::max)
        }
    }

    fn min_where(&self, id: &str, filter: impl Fn(&Entry) -> bool) -> f64 {
        let v = self.values(id, filter);
        if v.is_empty() {
            f64::NAN
        } else {
            v.into_iter().fold(f64::INFINITY, f64::min)
        }
    }
}

struct Gate {
    failures: usize,
}

impl Gate {
    fn criterion(&mut self, n: usize, name: &str, parts: &[(&str, f64, &str, f64)]) {
        let mut ok = true;
        let mut detail = Vec::new();
        for &(label, value, op, limit) in parts {
            let pass = match op {
                "<" => value < limit,
                "<=" => value <= limit,
                ">=" => value >= limit,
                _ => unreachable!(),
            };
            ok &= pass;
            detail.push(format!("{label} {value:.3e} {op} {limit:e}"));
        }
        if !ok {
            self.failures += 1;
        }
        println!(
            "criterion {n:>2}: {} {name}: {}",
            if ok { "PASS" } else { "FAIL" },
            detail.join("; ")
        );
    }
}

fn run_suite(out: &Path) {
    let status = Command::new(BIN)
        .arg("--out")
        .arg(out)
        .arg("suite")
        .env_remove("ZBW_FAULT")
        .env_remove("ZBW_SEED")
        .env_remove("ZBW_TOL")
        .output()
        .expect("zbw runs");
    assert!(
        status.status.code().is_some(),
        "zbw terminated by a signal: {}",
        String::from_utf8_lossy(&status.stderr)
    );
}

fn tree(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut files = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in fs::read_dir(&dir).expect("readable directory") {
            let path = entry.expect("directory entry").path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path.strip_prefix(root).expect("inside root").to_path_buf();
                files.insert(rel, fs::read(&path).expect("readable file"));
            }
        }
    }
    files
}

/// Number of files that differ or exist on one side only.
fn differing(a: &BTreeMap<PathBuf, Vec<u8>>, b: &BTreeMap<PathBuf, Vec<u8>>) -> usize {
    let keys: std::collections::BTreeSet<_> = a.keys().chain(b.keys()).collect();
    keys.into_iter().filter(|k| a.get(*k) != b.get(*k)).count()
}

fn main() {
    let tmp = tempfile::tempdir().expect("temporary directory");
    let (first, second) = (tmp.path().join("first"), tmp.path().join("second"));
    run_suite(&first);
    run_suite(&second);
    let s = Summary::load(&first);
    let mut gate = Gate { failures: 0 };

    let order = |e: &Entry| e.relation.starts_with("order");
    gate.criterion(
        1,
        "quantum-potential forms on a 2D Gaussian",
        &[
            (
                "gap at 128^2",
                s.max_where("madelung.form-gap", |e| !order(e)),
                "<",
                1e-3,
            ),
            ("slope", s.min_where("madelung.form-gap", order), ">=", 1.9),
        ],
    );
    gate.criterion(
        2,
        "harmonic-oscillator eigenstate identity",
        &[
            ("|-E + Q + U| at 256", s.max("madelung.eigenstate"), "<", 5e-4),
            ("slope", s.min_where("madelung.hj-slope", |_| true), ">=", 1.9),
        ],
    );
    gate.criterion(
        3,
        "continuity residual on an evolved Gaussian",
        &[("ratio", s.min_where("madelung.continuity-ratio", |_| true), ">=", 3.6)],
    );

    // Each Pauli check carries its own C h^2 bound as tolerance.
    let bounded = |id: &str| {
        s.0.iter()
            .filter(|e| e.id == id)
            .map(|e| e.value / e.tolerance)
            .fold(f64::NAN, f64::max)
    };
    gate.criterion(
        4,
        "Pauli current decomposition",
        &[
            ("residual / C h^2", bounded("pauli.decomposition"), "<", 1.0),
            ("spin divergence / C h^2", bounded("pauli.spin-divergence"), "<", 1.0),
        ],
    );
    gate.criterion(
        5,
        "V^2 identity and its violation",
        &[("relative error", s.max("pauli.vsq-identity"), "<", 1e-10)],
    );
    let spin2 = |e: &Entry| e.run == "pauli_spin_scale_2";
    gate.criterion(
        6,
        "Koenig split",
        &[
            ("|s| = hbar/2", s.max_where("pauli.koenig", |e| !spin2(e)), "<", 1e-10),
            ("|s| = hbar, ratio - 4", s.max_where("pauli.koenig", spin2), "<=", 1e-10),
        ],
    );
    gate.criterion(
        7,
        "diffusion coefficient",
        &[("|nu - hbar/2m|", s.max("pauli.diffusion"), "<=", 0.0)],
    );
    let sweep = |e: &Entry| e.run == "helix_sweep";
    gate.criterion(
        8,
        "mass constraint over the helix sweep",
        &[
            ("|p.v_new - m|", s.max_where("helix.mass-constraint", sweep), "<", 1e-12),
            ("p.v_std", s.max_where("helix.std-impulse", sweep), "<", 1e-12),
        ],
    );
    gate.criterion(
        9,
        "v^2 trichotomy",
        &[
            ("misclassified", s.max("helix.classification"), "<=", 0.0),
            ("light-like |v^2|", s.max("helix.light-like"), "<", 1e-10),
            ("boost invariance", s.max("helix.frame-invariance"), "<", 1e-10),
        ],
    );
    gate.criterion(
        10,
        "Barut-Zanghi relation",
        &[
            ("defect", s.max("helix.barut-zanghi"), "<", 1e-12),
            ("light-like |v''.v - 4m^2|", s.max("helix.bz-light-like"), "<", 1e-10),
        ],
    );
    gate.criterion(
        11,
        "Gordon decomposition",
        &[
            ("componentwise residual", s.max("dirac.gordon"), "<", 1e-12),
            ("|p.j - m|", s.max("dirac.footnote"), "<", 1e-12),
        ],
    );
    let (a, b) = (tree(&first), tree(&second));
    let files = a.len().max(b.len()) as f64;
    gate.criterion(
        12,
        "determinism",
        &[
            ("artifacts", files, ">=", 1.0),
            ("differing", differing(&a, &b) as f64, "<=", 0.0),
        ],
    );

    if gate.failures > 0 {
        println!("{} criteria failed", gate.failures);
        std::process::exit(1);
    }
}
