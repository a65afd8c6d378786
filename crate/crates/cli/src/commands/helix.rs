//! `zbw helix`: four-velocities, the mass constraint and the `v^2`
//! classification sampled along one helical trajectory.

use std::io::Write;

use nalgebra::Vector3;
use serde::Serialize;
use zbw_core::numeric::relative_difference;
use zbw_core::relkin::{
    barut_zanghi_check, classify_v2, four_velocity_new, four_velocity_std, mass_constraint_check, sample_series,
    v2_time_dependence, write_series_csv, Causality, HelicalTrajectory, V2Series,
};

use super::{finish, finite, positive};
use crate::args::{HelixArgs, HelixPreset};
use crate::report::{Checklist, OutDir};
use crate::{CliError, Context, Outcome};

#[derive(Debug, Clone, Serialize)]
pub struct HelixParams {
    pub preset: HelixPreset,
    pub boost: f64,
    pub radius: f64,
    pub omega: f64,
    pub phase: f64,
    pub bz_check: bool,
    pub modulation: f64,
    pub modulation_rate: f64,
    pub samples: usize,
    pub t_max: f64,
}

impl HelixParams {
    pub fn resolve(ctx: &Context, a: &HelixArgs) -> Result<Self, CliError> {
        let s = &ctx.settings;
        let (hbar, mass) = (ctx.constants.hbar, ctx.constants.mass);
        let preset = s.pick("preset", a.preset, HelixPreset::Custom)?;
        let bz_check = s.pick("bz-check", a.bz_check, false)?;
        let (radius, omega) = match preset {
            HelixPreset::LightLike => (hbar / (2.0 * mass), 2.0 * mass / hbar),
            HelixPreset::Custom => {
                let omega = finite(
                    "omega",
                    s.pick("omega", a.omega, if bz_check { 2.0 * mass / hbar } else { 1.0 })?,
                )?;
                let radius = match s.pick_opt("R", a.radius)? {
                    Some(r) => r,
                    None => {
                        let ratio: f64 = s.pick("omega-ratio", a.omega_ratio, 0.5)?;
                        if omega == 0.0 {
                            return Err(CliError::Usage("--omega-ratio needs a non-zero --omega".into()));
                        }
                        ratio / omega.abs()
                    }
                };
                (radius, omega)
            }
        };
        let p = HelixParams {
            preset,
            boost: finite("boost", s.pick("boost", a.boost, 0.0)?)?,
            radius,
            omega,
            phase: finite("phase", s.pick("phase", a.phase, 0.0)?)?,
            bz_check,
            modulation: finite("modulation", s.pick("modulation", a.modulation, 0.0)?)?,
            modulation_rate: finite("modulation-rate", s.pick("modulation-rate", a.modulation_rate, 0.3)?)?,
            samples: s.pick("samples", a.samples, 101)?,
            t_max: positive("t-max", s.pick("t-max", a.t_max, 10.0)?)?,
        };
        if p.samples < 2 {
            return Err(CliError::Usage("--samples must be at least 2".into()));
        }
        Ok(p)
    }

    pub fn trajectory(&self, mass: f64) -> Result<HelicalTrajectory, CliError> {
        let drift = Vector3::new(self.boost, 0.0, 0.0);
        let traj = HelicalTrajectory::new(mass, self.radius, self.omega, drift, self.phase)?;
        if self.modulation != 0.0 {
            Ok(traj.with_modulation(self.modulation, self.modulation_rate)?)
        } else {
            Ok(traj)
        }
    }

    fn times(&self) -> Vec<f64> {
        let n = self.samples - 1;
        (0..=n).map(|k| self.t_max * k as f64 / n as f64).collect()
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct HelixSummary {
    pub internal_speed: f64,
    pub expected_class: Option<Causality>,
    pub mass_constraint_max: f64,
    pub m1_max: f64,
    pub projection_max: f64,
    pub std_defined: usize,
    pub std_impulse_max: f64,
    pub frame_invariance_max: f64,
    pub classification_mismatches: usize,
    pub v2_min: f64,
    pub v2_max: f64,
    /// Largest `|v_std - v_new|` or `|v^2 - 1|`; meaningful for `R = 0`.
    pub scalar_gap: f64,
    pub barut_zanghi_max: f64,
    /// Largest `|hbar^2 v''.v - 4m^2|`.
    pub bz_light_like_max: f64,
}

impl HelixSummary {
    pub fn v2_abs_max(&self) -> f64 {
        self.v2_min.abs().max(self.v2_max.abs())
    }
}

#[derive(Debug, Serialize)]
struct HelixOutput<'a> {
    parameters: &'a HelixParams,
    trajectory: &'a HelicalTrajectory,
    summary: &'a HelixSummary,
    v2_series: Option<&'a V2Series>,
}

/// Extra frames in which `v^2` must come out unchanged.
pub const TEST_BOOSTS: [[f64; 3]; 3] = [[0.9, 0.0, 0.0], [0.0, 0.6, 0.6], [-0.5, 0.3, -0.6]];

/// Every invariant of one trajectory over the sampled lab times.
pub fn measure(traj: &HelicalTrajectory, times: &[f64], hbar: f64) -> Result<HelixSummary, CliError> {
    let mass = traj.mass();
    let speed = (traj.radius() * traj.omega()).abs();
    let mut sum = HelixSummary {
        internal_speed: speed,
        expected_class: traj.modulation().is_none().then(|| Causality::of(1.0 - speed * speed)),
        v2_min: f64::INFINITY,
        v2_max: f64::NEG_INFINITY,
        ..HelixSummary::default()
    };
    for &t in times {
        let mc = mass_constraint_check(traj, t);
        sum.mass_constraint_max = sum.mass_constraint_max.max((mc.p_dot_v_new - mass).abs());
        sum.m1_max = sum.m1_max.max((mc.m1 - mass).abs());
        sum.projection_max = sum.projection_max.max(mc.projection_defect);
        if let (Some(a), Some(b)) = (mc.p_dot_v_std, mc.p_dot_v_std_predicted) {
            sum.std_defined += 1;
            sum.std_impulse_max = sum.std_impulse_max.max(relative_difference(a, b, mass));
        }
        let c = classify_v2(traj, t)?;
        let new = four_velocity_new(traj, t);
        let mut invariance = c.invariance_defect;
        for b in TEST_BOOSTS {
            invariance = invariance.max((new.boost(Vector3::from(b))?.square() - c.v2_lab).abs());
        }
        sum.frame_invariance_max = sum.frame_invariance_max.max(invariance);
        sum.v2_min = sum.v2_min.min(c.v2_lab);
        sum.v2_max = sum.v2_max.max(c.v2_lab);
        let expected = sum.expected_class.unwrap_or_else(|| Causality::of(c.v2_expected));
        if c.class != expected {
            sum.classification_mismatches += 1;
        }
        let gap = match four_velocity_std(traj, t) {
            Ok(std) => (std - new).as_array().iter().map(|x| x.abs()).fold(0.0, f64::max),
            Err(_) => f64::INFINITY,
        };
        sum.scalar_gap = sum.scalar_gap.max(gap).max((c.v2_lab - 1.0).abs());
        let bz = barut_zanghi_check(traj, t, hbar);
        sum.barut_zanghi_max = sum.barut_zanghi_max.max(bz.defect);
        sum.bz_light_like_max = sum
            .bz_light_like_max
            .max((hbar * hbar * bz.vddot_dot_v - 4.0 * mass * mass).abs());
    }
    Ok(sum)
}

/// Records the checks that apply to the trajectory described by `p`.
fn record(p: &HelixParams, traj: &HelicalTrajectory, sum: &HelixSummary, hbar: f64, checks: &mut Checklist) {
    let mass = traj.mass();
    checks.at_most("helix.mass-constraint", "p.v_new = m", sum.mass_constraint_max);
    checks.at_most("helix.m1", "(p^0 - p.v)/sqrt(1 - w^2) = m", sum.m1_max);
    checks.at_most("helix.projection", "w.v = w^2", sum.projection_max);
    if sum.std_defined > 0 {
        checks.at_most(
            "helix.std-impulse",
            "p.v_std = m sqrt(1 - w^2)/sqrt(1 - v^2)",
            sum.std_impulse_max,
        );
    }
    checks.at_most(
        "helix.frame-invariance",
        "v^2 is the same in every frame",
        sum.frame_invariance_max,
    );
    checks.at_most(
        "helix.classification",
        "class of v^2 matches sign of 1 - (Omega R)^2",
        sum.classification_mismatches as f64,
    );
    if p.preset == HelixPreset::LightLike {
        checks.at_most("helix.light-like", "v^2 = 0 at Omega R = 1", sum.v2_abs_max());
        checks.at_most(
            "helix.bz-light-like",
            "hbar^2 v''.v = 4 m^2 on the light-like helix",
            sum.bz_light_like_max,
        );
    }
    if p.radius == 0.0 {
        checks.at_most("helix.scalar-limit", "R = 0: v^2 = 1 and v_std = v_new", sum.scalar_gap);
    }
    if p.bz_check || p.preset == HelixPreset::LightLike {
        let on_helix = traj.omega() == 2.0 * mass / hbar && p.modulation == 0.0;
        checks.at_most_if(
            on_helix,
            "helix.barut-zanghi",
            "v^2 = 1 - hbar^2 v''.v/4m^2",
            sum.barut_zanghi_max,
        );
    }
}

pub fn execute(ctx: &Context, p: &HelixParams, out: &mut OutDir, checks: &mut Checklist) -> Result<(), CliError> {
    let hbar = ctx.constants.hbar;
    let traj = p.trajectory(ctx.constants.mass)?;
    let times = p.times();
    let sum = measure(&traj, &times, hbar)?;
    record(p, &traj, &sum, hbar, checks);
    let series = if p.modulation != 0.0 {
        let s = v2_time_dependence(&traj, 0.0, p.t_max, p.samples)?;
        checks.at_most(
            "helix.v2-profile",
            "v^2 = 1 - r'^2 - (r Omega)^2",
            s.max_analytic_defect,
        );
        Some(s)
    } else {
        None
    };

    let samples = sample_series(&traj, &times);
    out.write_with("helix_series.csv", |w| Ok(write_series_csv(&samples, w)?))?;
    out.write_json(
        "helix_summary.json",
        &HelixOutput {
            parameters: p,
            trajectory: &traj,
            summary: &sum,
            v2_series: series.as_ref(),
        },
    )
}

/// Drift speeds, internal speeds `Omega R` and phases of the sweep.
pub const SWEEP_DRIFT: [f64; 5] = [0.0, 0.3, 0.6, 0.75, 0.9];
pub const SWEEP_SPEED: [f64; 5] = [0.5, 0.8, 1.0, 1.1, 1.2];
pub const SWEEP_PHASES: usize = 5;

/// The drift-speed x internal-speed x phase sweep, with `Omega = 1`.
pub fn sweep(ctx: &Context, out: &mut OutDir, checks: &mut Checklist) -> Result<(), CliError> {
    let (hbar, mass) = (ctx.constants.hbar, ctx.constants.mass);
    let times: Vec<f64> = (0..21).map(|k| 0.5 * k as f64).collect();
    let mut rows = Vec::new();
    let mut worst = HelixSummary::default();
    let mut light_v2 = 0.0_f64;
    for &w in &SWEEP_DRIFT {
        for &speed in &SWEEP_SPEED {
            for k in 0..SWEEP_PHASES {
                let phase = std::f64::consts::TAU * k as f64 / SWEEP_PHASES as f64;
                let traj = HelicalTrajectory::new(mass, speed, 1.0, Vector3::new(w, 0.0, 0.0), phase)?;
                let s = measure(&traj, &times, hbar)?;
                worst.mass_constraint_max = worst.mass_constraint_max.max(s.mass_constraint_max);
                worst.m1_max = worst.m1_max.max(s.m1_max);
                worst.projection_max = worst.projection_max.max(s.projection_max);
                worst.std_defined += s.std_defined;
                worst.std_impulse_max = worst.std_impulse_max.max(s.std_impulse_max);
                worst.frame_invariance_max = worst.frame_invariance_max.max(s.frame_invariance_max);
                worst.classification_mismatches += s.classification_mismatches;
                if speed == 1.0 {
                    light_v2 = light_v2.max(s.v2_abs_max());
                }
                rows.push((w, speed, phase, s));
            }
        }
    }
    let tag = "sweep";
    checks.at_most(
        "helix.mass-constraint",
        &format!("{tag}: p.v_new = m"),
        worst.mass_constraint_max,
    );
    checks.at_most(
        "helix.m1",
        &format!("{tag}: (p^0 - p.v)/sqrt(1 - w^2) = m"),
        worst.m1_max,
    );
    checks.at_most("helix.projection", &format!("{tag}: w.v = w^2"), worst.projection_max);
    checks.at_most(
        "helix.std-impulse",
        &format!("{tag}: p.v_std = m sqrt(1 - w^2)/sqrt(1 - v^2)"),
        worst.std_impulse_max,
    );
    checks.at_most(
        "helix.frame-invariance",
        &format!("{tag}: v^2 is the same in every frame"),
        worst.frame_invariance_max,
    );
    checks.at_most(
        "helix.classification",
        &format!("{tag}: class of v^2 matches sign of 1 - (Omega R)^2"),
        worst.classification_mismatches as f64,
    );
    checks.at_most("helix.light-like", &format!("{tag}: v^2 = 0 at Omega R = 1"), light_v2);
    out.write_with("helix_sweep.csv", |f| {
        writeln!(f, "drift,internal_speed,phase,class,v2_min,v2_max,p_dot_v_new_max,p_dot_v_std_max,std_defined,frame_invariance_max")?;
        for (w, speed, phase, s) in &rows {
            writeln!(
                f,
                "{w:e},{speed:e},{phase:e},{},{:e},{:e},{:e},{:e},{},{:e}",
                s.expected_class.map_or("", |c| c.as_str()),
                s.v2_min,
                s.v2_max,
                s.mass_constraint_max,
                s.std_impulse_max,
                s.std_defined,
                s.frame_invariance_max
            )?;
        }
        Ok(())
    })
}

pub fn command(ctx: &Context, a: &HelixArgs) -> Result<Outcome, CliError> {
    let p = HelixParams::resolve(ctx, a)?;
    let mut out = OutDir::create(&ctx.out)?;
    let mut checks = Checklist::new(&ctx.tolerances);
    execute(ctx, &p, &mut out, &mut checks)?;
    finish(ctx, out, "helix", &p, checks.into_checks())
}
