use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_zbw");

fn zbw(out: &Path, args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(BIN);
    for (k, _) in std::env::vars().filter(|(k, _)| k.starts_with("ZBW_")) {
        cmd.env_remove(k);
    }
    cmd.arg("--out").arg(out).args(args).envs(env.iter().copied());
    cmd.output().expect("zbw runs")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).expect("readable")).expect("valid JSON")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn check<'a>(manifest: &'a Value, id: &str) -> &'a Value {
    manifest["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["id"] == id)
        .unwrap_or_else(|| panic!("no check {id}"))
}

#[test]
fn madelung_plane_wave_passes() {
    let d = TempDir::new().unwrap();
    let o = zbw(d.path(), &["madelung", "--preset", "plane-wave"], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let m = json(&d.path().join("manifest.json"));
    for id in [
        "madelung.hj-residual",
        "madelung.continuity",
        "madelung.quantum-potential",
    ] {
        assert!(check(&m, id)["value"].as_f64().unwrap() < 1e-10);
    }
    assert!(d.path().join("madelung_report.json").exists());
}

#[test]
fn madelung_ho_ground_converges_at_second_order() {
    let d = TempDir::new().unwrap();
    let o = zbw(
        d.path(),
        &["madelung", "--preset", "ho-ground", "--grid", "256", "--refine", "3"],
        &[],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let m = json(&d.path().join("manifest.json"));
    assert!(check(&m, "madelung.hj-slope")["value"].as_f64().unwrap() >= 1.9);
    let table = fs::read_to_string(d.path().join("convergence.csv")).unwrap();
    assert_eq!(table.lines().count(), 4);
}

#[test]
fn madelung_perturbed_energy_is_reported() {
    let d = TempDir::new().unwrap();
    let o = zbw(
        d.path(),
        &["madelung", "--preset", "gaussian", "--perturb-E", "0.1"],
        &[],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let m = json(&d.path().join("manifest.json"));
    let offset = check(&m, "madelung.hj-offset")["value"].as_f64().unwrap();
    assert!((offset + 0.1).abs() < 5e-3, "offset {offset}");
}

#[test]
fn pauli_koenig_ratio_scales_with_spin() {
    for (scale, ratio) in [("1", 1.0), ("2", 4.0)] {
        let d = TempDir::new().unwrap();
        let o = zbw(
            d.path(),
            &["pauli", "--state", "gaussian-up", "--spin-scale", scale],
            &[],
        );
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let r = json(&d.path().join("pauli_report.json"));
        assert!((r["koenig"]["ratio_max"].as_f64().unwrap() - ratio).abs() < 1e-10);
        assert!((r["koenig"]["ratio_min"].as_f64().unwrap() - ratio).abs() < 1e-10);
    }
}

#[test]
fn pauli_plane_wave_has_no_internal_velocity() {
    let d = TempDir::new().unwrap();
    let o = zbw(d.path(), &["pauli", "--state", "plane-wave-up"], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let m = json(&d.path().join("manifest.json"));
    assert!(check(&m, "pauli.zbw-velocity")["value"].as_f64().unwrap() < 1e-12);
}

#[test]
fn helix_examples_pass() {
    let cases: &[&[&str]] = &[
        &["helix", "--preset", "light-like", "--boost", "0.6"],
        &["helix", "--R", "0"],
        &["helix", "--omega-ratio", "1.0", "--bz-check"],
    ];
    for args in cases {
        let d = TempDir::new().unwrap();
        let o = zbw(d.path(), args, &[]);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", stderr(&o));
        assert!(d.path().join("helix_series.csv").exists());
    }
}

#[test]
fn dirac_examples_pass() {
    let cases: &[&[&str]] = &[
        &["dirac", "--waves", "4", "--samples", "200", "--seed", "7"],
        &["dirac", "--waves", "1"],
        &["dirac", "--rest-frame"],
    ];
    for args in cases {
        let d = TempDir::new().unwrap();
        let o = zbw(d.path(), args, &[]);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", stderr(&o));
    }
    let d = TempDir::new().unwrap();
    zbw(d.path(), &["dirac", "--waves", "1"], &[]);
    let m = json(&d.path().join("manifest.json"));
    assert_eq!(check(&m, "dirac.spin-term")["value"].as_f64(), Some(0.0));
}

#[test]
fn usage_errors_exit_two() {
    let d = TempDir::new().unwrap();
    let cases: &[&[&str]] = &[
        &["madelung", "--preset", "nope"],
        &["madelung", "--grid", "2"],
        &["pauli", "--spin-scale", "-1"],
        &["dirac", "--max-speed", "1.5"],
        &["dirac", "--waves", "0"],
        &["--mass", "0", "helix"],
        &["--tol", "no.such.check=1", "helix"],
        &["--tol", "helix.m1", "helix"],
        &["frobnicate"],
    ];
    for args in cases {
        let o = zbw(d.path(), args, &[]);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn help_exits_zero() {
    let d = TempDir::new().unwrap();
    let o = zbw(d.path(), &["--help"], &[]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("suite"));
}

#[test]
fn tightened_tolerance_fails_with_exit_one() {
    let d = TempDir::new().unwrap();
    let o = zbw(d.path(), &["--tol", "pauli.decomposition=1e-6", "pauli"], &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("failed: pauli.decomposition"));
    assert!(stdout(&o).contains("FAIL pauli.decomposition"));
    let m = json(&d.path().join("manifest.json"));
    assert_eq!(m["passed"], false);
}

#[test]
fn precedence_is_flag_env_file_default() {
    let d = TempDir::new().unwrap();
    let cfg = d.path().join("zbw.conf");
    fs::write(&cfg, "# settings\nseed = 11\nsamples = 5\ntol.helix.m1 = 1e-9\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let seed = |out: &Path| json(&out.join("manifest.json"))["seed"].as_u64().unwrap();

    let a = d.path().join("default");
    zbw(&a, &["helix"], &[]);
    assert_eq!(seed(&a), 7);

    let b = d.path().join("file");
    zbw(&b, &["--config", cfg, "helix"], &[]);
    assert_eq!(seed(&b), 11);
    let m = json(&b.join("manifest.json"));
    assert_eq!(m["parameters"]["samples"], 5);
    assert_eq!(check(&m, "helix.m1")["tolerance"].as_f64(), Some(1e-9));

    let c = d.path().join("env");
    zbw(&c, &["--config", cfg, "helix"], &[("ZBW_SEED", "13")]);
    assert_eq!(seed(&c), 13);

    let e = d.path().join("flag");
    zbw(&e, &["--config", cfg, "--seed", "17", "helix"], &[("ZBW_SEED", "13")]);
    assert_eq!(seed(&e), 17);
}

#[test]
fn bad_config_exits_two() {
    let d = TempDir::new().unwrap();
    for text in ["bogus = 1\n", "no separator\n", "tol.helix.m1 = abc\n", "seed = -3\n"] {
        let cfg = d.path().join("bad.conf");
        fs::write(&cfg, text).unwrap();
        let o = zbw(d.path(), &["--config", cfg.to_str().unwrap(), "helix"], &[]);
        assert_eq!(o.status.code(), Some(2), "{text:?}");
    }
    let o = zbw(d.path(), &["--config", "/nonexistent/zbw.conf", "helix"], &[]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn manifest_lists_every_artifact() {
    let d = TempDir::new().unwrap();
    zbw(d.path(), &["dirac", "--waves", "2", "--samples", "10"], &[]);
    let m = json(&d.path().join("manifest.json"));
    assert_eq!(m["command"], "dirac");
    assert_eq!(m["constants"]["hbar"], 1.0);
    for a in m["artifacts"].as_array().unwrap() {
        assert!(d.path().join(a.as_str().unwrap()).is_file(), "{a}");
    }
}

#[test]
fn suite_json_matches_schema() {
    let d = TempDir::new().unwrap();
    let o = zbw(d.path(), &["suite", "--json"], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let s: Value = serde_json::from_str(&stdout(&o)).expect("stdout is the summary");
    assert_eq!(s["schema"], "zbw-suite/1");
    assert_eq!(s["seed"], 7);
    assert_eq!(s["passed"], true);
    assert!(s["failed"].as_array().unwrap().is_empty());
    let checks = s["checks"].as_array().unwrap();
    assert_eq!(s["total"].as_u64().unwrap() as usize, checks.len());
    for c in checks {
        for key in ["run", "id", "relation", "comparison"] {
            assert!(c[key].is_string(), "{key} in {c}");
        }
        assert!(c["value"].is_number() && c["passed"].is_boolean(), "{c}");
    }
    for module in ["madelung.", "pauli.", "helix.", "dirac."] {
        assert!(checks.iter().any(|c| c["id"].as_str().unwrap().starts_with(module)));
    }
    assert_eq!(s, json(&d.path().join("suite_summary.json")));
}

#[test]
fn suite_fault_injection_names_the_check() {
    let d = TempDir::new().unwrap();
    let o = zbw(d.path(), &["suite"], &[("ZBW_FAULT", "dirac.gordon")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("failed: dirac.gordon"));
    let s = json(&d.path().join("suite_summary.json"));
    assert!(s["failed"]
        .as_array()
        .unwrap()
        .iter()
        .any(|f| f.as_str().unwrap().ends_with("/dirac.gordon")));

    let o = zbw(d.path(), &["suite"], &[("ZBW_FAULT", "no.such.check")]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn same_seed_gives_identical_dirac_samples() {
    let d = TempDir::new().unwrap();
    let (a, b, c) = (d.path().join("a"), d.path().join("b"), d.path().join("c"));
    zbw(&a, &["--seed", "3", "dirac", "--samples", "20"], &[]);
    zbw(&b, &["--seed", "3", "dirac", "--samples", "20"], &[]);
    zbw(&c, &["--seed", "4", "dirac", "--samples", "20"], &[]);
    let read = |p: &Path| fs::read(p.join("gordon_samples.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
    assert_ne!(read(&a), read(&c));
}
