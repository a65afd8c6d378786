//! `zbw madelung`: quantum potential, Hamilton-Jacobi and continuity
//! residuals for analytic presets, with optional grid refinement.

use std::io::Write;

use serde::Serialize;
use zbw_core::evolve::{self, contained_half_width, make_state, EvolutionConfig, Potential, StatePreset};
use zbw_core::fieldcalc::{Grid, ScalarField};
use zbw_core::madelung::{
    continuity_residual, default_floor, polar_decompose, quantum_potential_form_gap, FormGap, MadelungReport,
};
use zbw_core::numeric::{compensated_sum, convergence_slope};

use super::{finish, finite, positive};
use crate::args::{MadelungArgs, MadelungPreset};
use crate::report::{Checklist, OutDir};
use crate::{CliError, Context, Outcome};

/// Lab time a packet is evolved before its residuals are taken.
pub const EVOLVE_TIME: f64 = 0.5;
/// Half-width of the plane-wave box.
const PLANE_WAVE_HALF_WIDTH: f64 = 10.0;

#[derive(Debug, Clone, Serialize)]
pub struct MadelungParams {
    pub preset: MadelungPreset,
    pub grid: usize,
    pub refine: usize,
    pub perturb_e: Option<f64>,
    pub omega: f64,
    pub momentum: f64,
    pub sigma: f64,
}

impl MadelungParams {
    pub fn resolve(ctx: &Context, a: &MadelungArgs) -> Result<Self, CliError> {
        let s = &ctx.settings;
        let p = MadelungParams {
            preset: s.pick("preset", a.preset, MadelungPreset::HoGround)?,
            grid: s.pick("grid", a.grid, 256)?,
            refine: s.pick("refine", a.refine, 1)?,
            perturb_e: s.pick_opt("perturb-E", a.perturb_e)?,
            omega: positive("omega", s.pick("omega", a.omega, 1.0)?)?,
            momentum: finite("momentum", s.pick("momentum", a.momentum, 1.0)?)?,
            sigma: positive("sigma", s.pick("sigma", a.sigma, 1.0)?)?,
        };
        if p.refine == 0 {
            return Err(CliError::Usage("--refine must be at least 1".into()));
        }
        if let Some(d) = p.perturb_e {
            finite("perturb-E", d)?;
        }
        Ok(p)
    }

    fn state(&self) -> StatePreset {
        let momentum = [self.momentum, 0.0, 0.0];
        match self.preset {
            MadelungPreset::HoGround => StatePreset::ho_ground(self.omega),
            MadelungPreset::PlaneWave => StatePreset::PlaneWave { momentum },
            MadelungPreset::Gaussian => StatePreset::GaussianPacket {
                sigma: self.sigma,
                momentum,
                center: [0.0; 3],
            },
        }
    }

    fn half_width(&self, hbar: f64, mass: f64) -> f64 {
        match self.preset {
            MadelungPreset::HoGround => contained_half_width((hbar / (mass * self.omega)).sqrt()),
            MadelungPreset::PlaneWave => PLANE_WAVE_HALF_WIDTH,
            MadelungPreset::Gaussian => {
                let spread = hbar * EVOLVE_TIME / (2.0 * mass * self.sigma * self.sigma);
                let sigma_t = self.sigma * (1.0 + spread * spread).sqrt();
                contained_half_width(std::f64::consts::SQRT_2 * sigma_t) + self.momentum.abs() * EVOLVE_TIME / mass
            }
        }
    }

    /// Node counts whose spacings halve exactly on the fixed box.
    fn nodes(&self) -> Vec<usize> {
        (0..self.refine).map(|k| (self.grid - 1) * (1 << k) + 1).collect()
    }
}

#[derive(Debug, Serialize)]
pub struct Level {
    pub nodes: usize,
    pub spacing: f64,
    pub dt: f64,
    pub steps: usize,
    pub normalization_defect: Option<f64>,
    /// rho-weighted mean of the Hamilton-Jacobi residual.
    pub hj_mean: f64,
    pub report: MadelungReport,
}

#[derive(Debug, Serialize)]
struct MadelungOutput<'a> {
    parameters: &'a MadelungParams,
    evolve_time: Option<f64>,
    levels: &'a [Level],
    hj_slope: Option<f64>,
    continuity_slope: Option<f64>,
}

fn level(ctx: &Context, p: &MadelungParams, n: usize, dt: f64, steps: usize) -> Result<Level, CliError> {
    let (hbar, mass) = (ctx.constants.hbar, ctx.constants.mass);
    let half = p.half_width(hbar, mass);
    let grid = Grid::line(n, -half, half)?;
    let preset = p.state();
    let delta = p.perturb_e.unwrap_or(0.0);
    let psi0 = make_state(&preset, &grid, hbar, mass)?;
    let potential = preset.natural_potential();
    let u = potential.sample(&grid, mass)?;
    let (psi, polar, dphi_dt, continuity) = match p.preset {
        MadelungPreset::Gaussian => {
            let evo = evolve::run(&psi0, &EvolutionConfig::new(dt, steps, Potential::Free), hbar, mass)?;
            let snap = evolve::snapshot_pair(&evo.psi, &EvolutionConfig::new(dt, 1, Potential::Free), hbar, mass)?;
            let c = snap.continuity_residual()?;
            let dphi = snap.dphi_dt.map(|v| v - delta);
            (evo.psi, snap.polar, dphi, c)
        }
        _ => {
            let rho = psi0.density();
            let polar = polar_decompose(&psi0, hbar, mass, default_floor(&rho))?;
            let e = preset.energy(&grid, hbar, mass).expect("eigen presets carry an energy");
            let dphi = ScalarField::constant(grid, -(e + delta));
            let c = continuity_residual(&rho, &rho, &polar, dt)?;
            (psi0, polar, dphi, c)
        }
    };
    let report = MadelungReport::evaluate(format!("{n} nodes"), &polar, &u, &dphi_dt, Some(continuity))?;
    let mask = report.hj_residual.interior_mask();
    let rho = polar.rho().values();
    let pick = |f: &dyn Fn(usize) -> f64| compensated_sum((0..rho.len()).filter(|&i| mask.is_valid(i)).map(f));
    let hj = report.hj_residual.field.values();
    let hj_mean = pick(&|i| rho[i] * hj[i]) / pick(&|i| rho[i]);
    let normalization_defect = match p.preset {
        MadelungPreset::PlaneWave => None,
        _ => Some((psi.norm_sqr() - 1.0).abs()),
    };
    Ok(Level {
        nodes: n,
        spacing: grid.spacing()[0],
        dt,
        steps,
        normalization_defect,
        hj_mean,
        report,
    })
}

fn write_level_csv(out: &mut OutDir, l: &Level) -> Result<(), CliError> {
    let r = &l.report;
    let grid = *r.hj_residual.field.grid();
    let cont = r
        .continuity_residual
        .as_ref()
        .expect("every level carries a continuity residual");
    out.write_with(&format!("madelung_n{}.csv", l.nodes), |w| {
        writeln!(
            w,
            "x,quantum_potential,hj_residual,continuity_residual,hj_valid,continuity_valid"
        )?;
        for i in 0..grid.len() {
            writeln!(
                w,
                "{:e},{:e},{:e},{:e},{},{}",
                grid.position(i)[0],
                r.quantum_potential.field.values()[i],
                r.hj_residual.field.values()[i],
                cont.field.values()[i],
                u8::from(r.hj_residual.interior_mask().is_valid(i)),
                u8::from(cont.interior_mask().is_valid(i)),
            )?;
        }
        Ok(())
    })
}

/// Runs every level and records checks; shared with the suite.
pub fn execute(ctx: &Context, p: &MadelungParams, out: &mut OutDir, checks: &mut Checklist) -> Result<(), CliError> {
    let (hbar, mass) = (ctx.constants.hbar, ctx.constants.mass);
    let nodes = p.nodes();
    let half = p.half_width(hbar, mass);
    let finest = Grid::line(*nodes.last().expect("refine >= 1"), -half, half)?;
    let fine_bound = EvolutionConfig::stability_bound(&finest, hbar, mass);
    let coarse_dt = fine_bound * (1u64 << (nodes.len() - 1)) as f64;
    let coarse_steps = (EVOLVE_TIME / coarse_dt).ceil() as usize;
    let mut levels = Vec::with_capacity(nodes.len());
    for (k, &n) in nodes.iter().enumerate() {
        let (dt, steps) = match p.preset {
            MadelungPreset::Gaussian => (coarse_dt / (1u64 << k) as f64, coarse_steps << k),
            _ => {
                let g = Grid::line(n, -half, half)?;
                (EvolutionConfig::stability_bound(&g, hbar, mass), 0)
            }
        };
        levels.push(level(ctx, p, n, dt, steps)?);
    }

    let spacings: Vec<f64> = levels.iter().map(|l| l.spacing).collect();
    let hj: Vec<f64> = levels.iter().map(|l| l.report.hj_norms.max).collect();
    let cont: Vec<f64> = levels
        .iter()
        .map(|l| l.report.continuity_norms.map_or(f64::NAN, |n| n.max))
        .collect();
    let hj_slope = convergence_slope(&spacings, &hj);
    let continuity_slope = convergence_slope(&spacings, &cont);
    let perturbed = p.perturb_e.is_some();

    for l in &levels {
        if let Some(d) = l.normalization_defect {
            checks.at_most("madelung.normalization", "sum |psi|^2 dV = 1", d);
        }
    }
    let hj_max = hj.iter().copied().fold(0.0, f64::max);
    let cont_max = cont.iter().copied().fold(0.0, f64::max);
    match p.preset {
        MadelungPreset::PlaneWave => {
            checks.at_most_if(
                !perturbed,
                "madelung.hj-residual",
                "dphi/dt + (grad phi)^2/2m + Q + U = 0",
                hj_max,
            );
            checks.at_most("madelung.continuity", "drho/dt + div(rho grad phi/m) = 0", cont_max);
            let q = levels
                .iter()
                .map(|l| l.report.quantum_potential_norms.max)
                .fold(0.0, f64::max);
            checks.at_most("madelung.quantum-potential", "Q = 0 for uniform density", q);
        }
        MadelungPreset::HoGround => {
            checks.report("madelung.eigenstate", "|-E + Q + U| interior max, coarsest grid", hj[0]);
            if let Some(s) = hj_slope {
                if perturbed {
                    checks.report("madelung.hj-slope", "order of the Hamilton-Jacobi residual", s);
                } else {
                    checks.at_least("madelung.hj-slope", "order of the Hamilton-Jacobi residual", s);
                }
            }
            checks.report("madelung.continuity", "stationary continuity residual", cont_max);
        }
        MadelungPreset::Gaussian => {
            for l in &levels {
                checks.report(
                    "madelung.continuity",
                    &format!("continuity residual max, {} nodes", l.nodes),
                    l.report.continuity_norms.map_or(f64::NAN, |n| n.max),
                );
            }
            let worst_ratio = cont.windows(2).map(|w| w[0] / w[1]).fold(f64::INFINITY, f64::min);
            if cont.len() > 1 {
                checks.at_least(
                    "madelung.continuity-ratio",
                    "residual drop when h and dt halve",
                    worst_ratio,
                );
            }
            checks.report(
                "madelung.hj-residual",
                "Hamilton-Jacobi residual max, finest grid",
                *hj.last().expect("levels"),
            );
        }
    }
    if perturbed {
        let l = levels.last().expect("levels");
        checks.report_against(
            "madelung.hj-offset",
            "rho-weighted mean HJ residual vs -delta E",
            l.hj_mean,
            -p.perturb_e.unwrap_or(0.0),
        );
    }

    out.write_with("convergence.csv", |w| {
        writeln!(
            w,
            "nodes,spacing,dt,hj_max,hj_l2,continuity_max,quantum_potential_max,hj_mean"
        )?;
        for l in &levels {
            let c = l.report.continuity_norms.expect("continuity present");
            writeln!(
                w,
                "{},{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
                l.nodes,
                l.spacing,
                l.dt,
                l.report.hj_norms.max,
                l.report.hj_norms.l2,
                c.max,
                l.report.quantum_potential_norms.max,
                l.hj_mean
            )?;
        }
        Ok(())
    })?;
    for l in &levels {
        write_level_csv(out, l)?;
    }
    out.write_json(
        "madelung_report.json",
        &MadelungOutput {
            parameters: p,
            evolve_time: (p.preset == MadelungPreset::Gaussian).then_some(EVOLVE_TIME),
            levels: &levels,
            hj_slope,
            continuity_slope,
        },
    )
}

/// Gap between the two forms of Q on a 2D Gaussian density, per grid.
#[derive(Debug, Serialize)]
pub struct FormGapStudy {
    pub width: f64,
    pub levels: Vec<FormGap>,
    pub slope: Option<f64>,
}

pub fn form_gap_study(ctx: &Context, sides: &[usize], width: f64) -> Result<FormGapStudy, CliError> {
    let (hbar, mass) = (ctx.constants.hbar, ctx.constants.mass);
    let half = contained_half_width(width);
    let mut levels = Vec::new();
    for &n in sides {
        let grid = Grid::square(n, -half, half)?;
        let rho = ScalarField::from_fn(grid, |x| (-(x[0] * x[0] + x[1] * x[1]) / (width * width)).exp());
        levels.push(quantum_potential_form_gap(&rho, hbar, mass, default_floor(&rho)));
    }
    let spacings: Vec<f64> = levels.iter().map(|g| g.spacing).collect();
    let gaps: Vec<f64> = levels.iter().map(|g| g.max_relative).collect();
    Ok(FormGapStudy {
        width,
        slope: convergence_slope(&spacings, &gaps),
        levels,
    })
}

pub fn command(ctx: &Context, a: &MadelungArgs) -> Result<Outcome, CliError> {
    let p = MadelungParams::resolve(ctx, a)?;
    let mut out = OutDir::create(&ctx.out)?;
    let mut checks = Checklist::new(&ctx.tolerances);
    execute(ctx, &p, &mut out, &mut checks)?;
    finish(ctx, out, "madelung", &p, checks.into_checks())
}
