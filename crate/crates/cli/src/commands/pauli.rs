//! `zbw pauli`: current split, internal velocity and the energy identities
//! for factorised spin-up states on a square grid.

use std::io::Write;

use nalgebra::Vector3;
use serde::Serialize;
use zbw_core::evolve::{contained_half_width, make_state, StatePreset};
use zbw_core::fieldcalc::{gradient, Grid, NodeMask, BOUNDARY_LAYER};
use zbw_core::madelung::{default_floor, polar_decompose};
use zbw_core::pauli::{
    decompose_current, diffusion_coefficient, koenig_split_check, spin_vector_field, takabayasi_beta,
    vsq_identity_check, KoenigReport, MomentumRoute, PauliSpinorField, SpinState, TakabayasiBranch, VsqReport,
};

use super::{finish, finite, positive};
use crate::args::{PauliArgs, PauliState};
use crate::report::{Checklist, OutDir};
use crate::{CliError, Context, Outcome};

/// Packet width of the Gaussian state.
pub const SIGMA: f64 = 1.0;
const PLANE_WAVE_HALF_WIDTH: f64 = 10.0;
/// Polar angle of the tilted spin used to break `grad rho . s = 0`.
const TILT: f64 = 0.7;

#[derive(Debug, Clone, Serialize)]
pub struct PauliParams {
    pub state: PauliState,
    pub grid: usize,
    pub spin_scale: f64,
    pub momentum: f64,
    pub sigma: f64,
}

impl PauliParams {
    pub fn resolve(ctx: &Context, a: &PauliArgs) -> Result<Self, CliError> {
        let s = &ctx.settings;
        Ok(PauliParams {
            state: s.pick("state", a.state, PauliState::GaussianUp)?,
            grid: s.pick("grid", a.grid, 64)?,
            spin_scale: positive("spin-scale", s.pick("spin-scale", a.spin_scale, 1.0)?)?,
            momentum: finite("momentum", s.pick("momentum", a.momentum, 0.5)?)?,
            sigma: SIGMA,
        })
    }
}

#[derive(Debug, Serialize)]
struct PauliOutput<'a> {
    parameters: &'a PauliParams,
    spacing: f64,
    route: MomentumRoute,
    residual_max: f64,
    spin_divergence_max: f64,
    /// Analytic leading coefficient `C` of the `C h^2` residual.
    leading_coefficient: f64,
    residual_bound: f64,
    zbw_velocity_error: f64,
    koenig: KoenigReport,
    vsq_orthogonal: VsqReport,
    vsq_tilted: VsqReport,
    diffusion: f64,
    takabayasi_max: f64,
}

/// Largest `|rho p_a (a_aa/(2a) - p_a^2/(6 hbar^2))/m|` over valid interior
/// nodes, with amplitude `a` (Gaussian `exp(-r^2/4 sigma^2)` or constant) and
/// `p = (p, 0)`: the `h^2` coefficient of `j_kinetic - rho grad phi/m` for
/// centred differences.
fn leading_coefficient(p: &PauliParams, rho: &[f64], grid: &Grid, mask: &NodeMask, hbar: f64, mass: f64) -> f64 {
    let s2 = p.sigma * p.sigma;
    let px = p.momentum;
    (0..grid.len())
        .filter(|&i| mask.is_valid(i))
        .map(|i| {
            let x = grid.position(i)[0];
            let axx = match p.state {
                PauliState::GaussianUp => x * x / (4.0 * s2 * s2) - 1.0 / (2.0 * s2),
                PauliState::PlaneWaveUp => 0.0,
            };
            (rho[i] * px * (0.5 * axx - px * px / (6.0 * hbar * hbar)) / mass).abs()
        })
        .fold(0.0, f64::max)
}

pub fn execute(ctx: &Context, p: &PauliParams, out: &mut OutDir, checks: &mut Checklist) -> Result<(), CliError> {
    let k = ctx.constants;
    let (hbar, mass) = (k.hbar, k.mass);
    let momentum = [p.momentum, 0.0, 0.0];
    let (preset, half) = match p.state {
        PauliState::GaussianUp => (
            StatePreset::GaussianPacket {
                sigma: p.sigma,
                momentum,
                center: [0.0; 3],
            },
            contained_half_width(std::f64::consts::SQRT_2 * p.sigma),
        ),
        PauliState::PlaneWaveUp => (StatePreset::PlaneWave { momentum }, PLANE_WAVE_HALF_WIDTH),
    };
    let grid = Grid::square(p.grid, -half, half)?;
    let h = grid.spacing()[0];
    let scalar = make_state(&preset, &grid, hbar, mass)?;
    let spin = SpinState::up(hbar);
    let psi = PauliSpinorField::factorized(&scalar, &spin, k, None)?;
    let rho = psi.density();
    let d = decompose_current(&psi)?;
    let interior = d.mask.and(&NodeMask::interior(&grid, BOUNDARY_LAYER));

    let c_lead = leading_coefficient(p, rho.values(), &grid, &interior, hbar, mass);
    let j_scale = d.j_total.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
    let roundoff = 100.0 * f64::EPSILON * j_scale;
    let factor = checks.tolerance("pauli.decomposition");
    let bound = factor * c_lead * h * h + roundoff;
    checks.at_most_bound(
        "pauli.decomposition",
        "j = j_convective + j_spin, interior max <= C h^2",
        d.residual.max,
        bound,
    );
    let div_factor = checks.tolerance("pauli.spin-divergence");
    let div_bound = div_factor * c_lead * h * h + roundoff / h;
    checks.at_most_bound(
        "pauli.spin-divergence",
        "div(curl(rho s))/m = 0, interior max <= C h^2",
        d.spin_divergence.max,
        div_bound,
    );

    let s_vec = spin.spin();
    let grad = gradient(&rho);
    let mut v_err = 0.0_f64;
    let mut v_max = 0.0_f64;
    for i in (0..grid.len()).filter(|&i| interior.is_valid(i)) {
        let v = d.zbw_velocity.values()[i];
        let expect = grad.values()[i].cross(&s_vec) / (mass * rho.values()[i]);
        v_err = v_err.max((v - expect).norm());
        v_max = v_max.max(v.norm());
    }
    match p.state {
        PauliState::GaussianUp => {
            let rel = if v_max > 0.0 { v_err / v_max } else { v_err };
            checks.at_most("pauli.zbw-velocity", "V = grad rho x s/(m rho)", rel);
        }
        PauliState::PlaneWaveUp => checks.at_most("pauli.zbw-velocity", "V = 0 for uniform density", v_max),
    }

    let polar = polar_decompose(&scalar, hbar, mass, default_floor(&rho))?;
    let s_scaled = Vector3::new(0.0, 0.0, p.spin_scale * 0.5 * hbar);
    let koenig = koenig_split_check(&rho, polar.phi(), s_scaled, hbar, mass)?;
    let ratio_err = (koenig.ratio_max - koenig.expected_ratio)
        .abs()
        .max((koenig.ratio_min - koenig.expected_ratio).abs());
    checks.at_most(
        "pauli.koenig",
        &format!(
            "m V^2/2 = ratio (hbar^2/8m)(grad rho/rho)^2, ratio {:e}",
            koenig.expected_ratio
        ),
        ratio_err,
    );

    let vsq = vsq_identity_check(&rho, s_vec, mass);
    checks.at_most(
        "pauli.vsq-identity",
        "V^2 = s^2 (grad rho/m rho)^2 when grad rho . s = 0",
        vsq.identity_relative_error,
    );
    let tilted = vsq_identity_check(&rho, SpinState::along(TILT, 0.0, hbar).spin(), mass);
    checks.at_most(
        "pauli.vsq-identity",
        "violation = (grad rho . s)^2/(m rho)^2 for tilted s",
        tilted.violation_model_error,
    );

    let s_peak = spin_vector_field(&psi).field.values()[grid.center_index()].norm();
    let nu = diffusion_coefficient(s_peak, mass)?;
    checks.at_most(
        "pauli.diffusion",
        "nu = |s|/m = hbar/2m",
        (nu - hbar / (2.0 * mass)).abs(),
    );

    let s_field = spin_vector_field(&psi).field;
    let beta = takabayasi_beta(&rho, &s_field, mass, TakabayasiBranch::Electron, 1e-12)?;
    let beta_max = (0..grid.len())
        .filter(|&i| beta.mask.is_valid(i))
        .map(|i| beta.beta.values()[i].abs())
        .fold(0.0, f64::max);
    checks.at_most(
        "pauli.takabayasi",
        "beta = 0 for z-independent rho with s along z",
        beta_max,
    );

    out.write_with("pauli_fields.csv", |w| {
        writeln!(w, "x,y,rho,j_x,j_y,j_spin_x,j_spin_y,V_x,V_y,w_x,w_y,valid")?;
        for i in 0..grid.len() {
            let [x, y, _] = grid.position(i);
            let (j, js, v, dv) = (
                d.j_total.values()[i],
                d.j_spin.values()[i],
                d.zbw_velocity.values()[i],
                d.drift_velocity.values()[i],
            );
            writeln!(
                w,
                "{x:e},{y:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{}",
                rho.values()[i],
                j.x,
                j.y,
                js.x,
                js.y,
                v.x,
                v.y,
                dv.x,
                dv.y,
                u8::from(interior.is_valid(i))
            )?;
        }
        Ok(())
    })?;
    out.write_json(
        "pauli_report.json",
        &PauliOutput {
            parameters: p,
            spacing: h,
            route: d.route,
            residual_max: d.residual.max,
            spin_divergence_max: d.spin_divergence.max,
            leading_coefficient: c_lead,
            residual_bound: bound,
            zbw_velocity_error: v_err,
            koenig,
            vsq_orthogonal: vsq,
            vsq_tilted: tilted,
            diffusion: nu,
            takabayasi_max: beta_max,
        },
    )
}

pub fn command(ctx: &Context, a: &PauliArgs) -> Result<Outcome, CliError> {
    let p = PauliParams::resolve(ctx, a)?;
    let mut out = OutDir::create(&ctx.out)?;
    let mut checks = Checklist::new(&ctx.tolerances);
    execute(ctx, &p, &mut out, &mut checks)?;
    finish(ctx, out, "pauli", &p, checks.into_checks())
}
