//! Polar (Madelung) form of scalar wavefunctions and the fluid equations:
//! quantum potential, Hamilton-Jacobi residual, continuity residual and the
//! equivalence of the two lagrangian densities.
//!
//! Conventions: `psi = sqrt(rho) exp(i phi / hbar)`, drift momentum
//! `p = +grad phi` so that `rho grad(phi) / m` is the convective current.

use nalgebra::Vector3;
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::{PI, TAU};

use crate::fieldcalc::{
    gradient, laplacian, partial, ComplexScalarField, Grid, NodeMask, Norms, ScalarField, VectorField3, BOUNDARY_LAYER,
};
use crate::numeric::compensated_sum;
use crate::{Error, Result};

/// Default density floor, relative to `max(rho)`.
pub const DEFAULT_RELATIVE_FLOOR: f64 = 1e-12;

pub fn default_floor(rho: &ScalarField) -> f64 {
    DEFAULT_RELATIVE_FLOOR * rho.max_abs()
}

/// Density / phase pair of a scalar wavefunction.
#[derive(Debug, Clone)]
pub struct PolarForm {
    rho: ScalarField,
    phi: ScalarField,
    mask: NodeMask,
    hbar: f64,
    mass: f64,
    floor: f64,
}

impl PolarForm {
    /// Builds a polar form from given density and phase; nodes below `floor`
    /// are masked.
    pub fn from_parts(rho: ScalarField, phi: ScalarField, hbar: f64, mass: f64, floor: f64) -> Result<Self> {
        rho.grid().ensure_same(phi.grid(), "polar form")?;
        if let Some(i) = rho.values().iter().position(|&r| !(r >= 0.0)) {
            return Err(Error::Domain(format!("negative or NaN density at node {i}")));
        }
        let mask = NodeMask::from_flags(rho.values().iter().map(|&r| r >= floor && r > 0.0).collect());
        if mask.count() == 0 {
            return Err(Error::DegenerateState { floor });
        }
        Ok(PolarForm {
            rho,
            phi,
            mask,
            hbar,
            mass,
            floor,
        })
    }

    pub fn rho(&self) -> &ScalarField {
        &self.rho
    }

    pub fn phi(&self) -> &ScalarField {
        &self.phi
    }

    /// Nodes at or above the density floor.
    pub fn mask(&self) -> &NodeMask {
        &self.mask
    }

    pub fn grid(&self) -> &Grid {
        self.rho.grid()
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn floor(&self) -> f64 {
        self.floor
    }

    /// `sqrt(rho) exp(i phi / hbar)` at every node.
    pub fn reconstruct(&self) -> ComplexScalarField {
        let values = self
            .rho
            .values()
            .iter()
            .zip(self.phi.values())
            .map(|(&r, &p)| Complex64::from_polar(r.sqrt(), p / self.hbar))
            .collect();
        ComplexScalarField::new(*self.grid(), values).expect("finite by construction")
    }
}

fn wrap(d: f64) -> f64 {
    // into (-pi, pi]
    let r = d - TAU * (d / TAU).round();
    if r <= -PI {
        r + TAU
    } else {
        r
    }
}

/// Unwraps one grid line in place, walking outward from `seed` (an offset
/// along the line). Masked nodes follow the last valid reference.
fn unwrap_line(line: &[usize], seed: usize, raw: &[f64], valid: &[bool], out: &mut [f64]) {
    for dir in [1isize, -1] {
        let mut reference = out[line[seed]];
        let mut pos = seed as isize + dir;
        while pos >= 0 && (pos as usize) < line.len() {
            let idx = line[pos as usize];
            out[idx] = reference + wrap(raw[idx] - reference);
            if valid[idx] {
                reference = out[idx];
            }
            pos += dir;
        }
    }
}

/// Splits `psi` into density and unwrapped phase.
///
/// The phase is unwrapped along x through the centre node, then along y from
/// that line, then along z. Adjacent valid nodes differing by more than pi
/// after unwrapping indicate a phase singularity and are rejected.
pub fn polar_decompose(psi: &ComplexScalarField, hbar: f64, mass: f64, rho_floor: f64) -> Result<PolarForm> {
    let grid = *psi.grid();
    let rho = psi.density();
    let valid: Vec<bool> = rho.values().iter().map(|&r| r >= rho_floor && r > 0.0).collect();
    if !valid.iter().any(|&v| v) {
        return Err(Error::DegenerateState { floor: rho_floor });
    }
    let raw: Vec<f64> = psi.values().iter().map(|z| z.arg()).collect();
    let mut theta = raw.clone();
    let [nx, ny, nz] = grid.dims();
    let [ic, jc, kc] = grid.coords(grid.center_index());

    let x_line: Vec<usize> = (0..nx).map(|i| grid.index(i, jc, kc)).collect();
    unwrap_line(&x_line, ic, &raw, &valid, &mut theta);
    for i in 0..nx {
        let y_line: Vec<usize> = (0..ny).map(|j| grid.index(i, j, kc)).collect();
        unwrap_line(&y_line, jc, &raw, &valid, &mut theta);
    }
    for i in 0..nx {
        for j in 0..ny {
            let z_line: Vec<usize> = (0..nz).map(|k| grid.index(i, j, k)).collect();
            unwrap_line(&z_line, kc, &raw, &valid, &mut theta);
        }
    }

    let strides = grid.strides();
    for idx in 0..grid.len() {
        if !valid[idx] {
            continue;
        }
        let c = grid.coords(idx);
        for axis in (0..3).filter(|&a| grid.is_active(a)) {
            if c[axis] + 1 < grid.dims()[axis] {
                let nb = idx + strides[axis];
                let jump = (theta[nb] - theta[idx]).abs();
                if valid[nb] && jump > PI {
                    return Err(Error::Vortex { node: idx, axis, jump });
                }
            }
        }
    }

    let phi = ScalarField::new(grid, theta.iter().map(|t| hbar * t).collect())?;
    PolarForm::from_parts(rho, phi, hbar, mass, rho_floor)
}

/// A scalar field together with the nodes where it is defined.
#[derive(Debug, Clone)]
pub struct MaskedScalar {
    pub field: ScalarField,
    pub mask: NodeMask,
}

impl MaskedScalar {
    /// Norms over valid nodes outside the boundary layer.
    pub fn interior_norms(&self) -> Norms {
        let m = self.mask.and(&NodeMask::interior(self.field.grid(), BOUNDARY_LAYER));
        Norms::of_scalar(&self.field, &m)
    }

    pub fn interior_mask(&self) -> NodeMask {
        self.mask.and(&NodeMask::interior(self.field.grid(), BOUNDARY_LAYER))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuantumPotentialForm {
    /// `(hbar^2 / 4m) [ (grad rho / rho)^2 / 2 - lap rho / rho ]`
    DensityGradient,
    /// `-(hbar^2 / 2m) lap sqrt(rho) / sqrt(rho)`
    Amplitude,
}

pub fn quantum_potential(
    rho: &ScalarField,
    hbar: f64,
    mass: f64,
    rho_floor: f64,
    form: QuantumPotentialForm,
) -> MaskedScalar {
    let grid = *rho.grid();
    let mask = NodeMask::from_flags(rho.values().iter().map(|&r| r >= rho_floor && r > 0.0).collect());
    let values: Vec<f64> = match form {
        QuantumPotentialForm::DensityGradient => {
            let c = hbar * hbar / (4.0 * mass);
            let g = gradient(rho);
            let l = laplacian(rho);
            (0..grid.len())
                .map(|i| {
                    if !mask.is_valid(i) {
                        return 0.0;
                    }
                    let r = rho.values()[i];
                    let u = g.values()[i] / r;
                    c * (0.5 * u.norm_squared() - l.values()[i] / r)
                })
                .collect()
        }
        QuantumPotentialForm::Amplitude => {
            let c = hbar * hbar / (2.0 * mass);
            let amp = rho.map(f64::sqrt);
            let l = laplacian(&amp);
            (0..grid.len())
                .map(|i| {
                    if mask.is_valid(i) {
                        -c * (l.values()[i] / amp.values()[i])
                    } else {
                        0.0
                    }
                })
                .collect()
        }
    };
    MaskedScalar {
        field: ScalarField::new(grid, values).expect("length preserved"),
        mask,
    }
}

/// Node-wise difference between the two forms of the quantum potential.
pub fn quantum_potential_form_gap(rho: &ScalarField, hbar: f64, mass: f64, rho_floor: f64) -> FormGap {
    let q1 = quantum_potential(rho, hbar, mass, rho_floor, QuantumPotentialForm::DensityGradient);
    let q2 = quantum_potential(rho, hbar, mass, rho_floor, QuantumPotentialForm::Amplitude);
    let diff = MaskedScalar {
        field: q1.field.zip_with(&q2.field, |a, b| a - b).expect("same grid"),
        mask: q1.mask.clone(),
    };
    let abs_max = diff.interior_norms().max;
    let scale = Norms::of_scalar(&q1.field, &diff.interior_mask()).max;
    FormGap {
        max_abs: abs_max,
        scale,
        max_relative: if scale > 0.0 { abs_max / scale } else { abs_max },
        spacing: rho.grid().max_spacing(),
    }
}

/// Gap between the density-gradient and amplitude forms of `Q`. The relative
/// gap is normalised by the largest `|Q|` on the evaluated nodes.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FormGap {
    pub max_abs: f64,
    pub scale: f64,
    pub max_relative: f64,
    pub spacing: f64,
}

/// `dphi/dt + (grad phi)^2 / 2m + Q + U`, evaluated node-wise.
pub fn hj_residual(polar: &PolarForm, potential: &ScalarField, dphi_dt: &ScalarField) -> Result<MaskedScalar> {
    let grid = *polar.grid();
    grid.ensure_same(potential.grid(), "potential")?;
    grid.ensure_same(dphi_dt.grid(), "dphi/dt")?;
    let q = quantum_potential(
        polar.rho(),
        polar.hbar(),
        polar.mass(),
        polar.floor(),
        QuantumPotentialForm::DensityGradient,
    );
    let grad_phi = gradient(polar.phi());
    let mask = polar.mask().eroded(&grid, 1).and(&q.mask);
    let m = polar.mass();
    let values = (0..grid.len())
        .map(|i| {
            if !mask.is_valid(i) {
                return 0.0;
            }
            dphi_dt.values()[i]
                + grad_phi.values()[i].norm_squared() / (2.0 * m)
                + q.field.values()[i]
                + potential.values()[i]
        })
        .collect();
    Ok(MaskedScalar {
        field: ScalarField::new(grid, values)?,
        mask,
    })
}

/// `d_t rho + div(rho grad(phi) / m)` with a centred time difference between
/// two density snapshots `dt` apart and the phase at their midpoint.
pub fn continuity_residual(
    rho_before: &ScalarField,
    rho_after: &ScalarField,
    midpoint: &PolarForm,
    dt: f64,
) -> Result<MaskedScalar> {
    if !(dt > 0.0) {
        return Err(Error::Config(format!("dt must be positive, got {dt}")));
    }
    let grid = *midpoint.grid();
    grid.ensure_same(rho_before.grid(), "rho snapshot")?;
    grid.ensure_same(rho_after.grid(), "rho snapshot")?;
    let valid = midpoint.mask();
    let grad_phi = gradient(midpoint.phi());
    let m = midpoint.mass();
    let flux: Vec<Vector3<f64>> = (0..grid.len())
        .map(|i| {
            if valid.is_valid(i) {
                let r = 0.5 * (rho_before.values()[i] + rho_after.values()[i]);
                grad_phi.values()[i] * (r / m)
            } else {
                Vector3::zeros()
            }
        })
        .collect();
    let div = crate::fieldcalc::divergence(&VectorField3::new(grid, flux)?);
    let mask = valid.eroded(&grid, 2);
    let values = (0..grid.len())
        .map(|i| {
            if mask.is_valid(i) {
                (rho_after.values()[i] - rho_before.values()[i]) / dt + div.values()[i]
            } else {
                0.0
            }
        })
        .collect();
    Ok(MaskedScalar {
        field: ScalarField::new(grid, values)?,
        mask,
    })
}

/// Sign convention for the drift momentum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MomentumConvention {
    /// `p = +grad phi`, the velocity carried by the continuity equation.
    Drift,
    /// `p = -grad phi`, the sign as printed alongside the energy split.
    Printed,
}

pub fn momentum_field(polar: &PolarForm) -> VectorField3 {
    momentum_field_with(polar, MomentumConvention::Drift)
}

pub fn momentum_field_with(polar: &PolarForm, convention: MomentumConvention) -> VectorField3 {
    let g = gradient(polar.phi());
    match convention {
        MomentumConvention::Drift => g,
        MomentumConvention::Printed => g.map(|v| -v),
    }
}

/// Comparison of the wavefunction lagrangian density with its polar form.
#[derive(Debug, Clone, Serialize)]
pub struct LagrangianReport {
    /// Max-norm of the node-wise difference on valid interior nodes.
    pub pointwise: Norms,
    pub integral_wavefunction_form: f64,
    pub integral_polar_form: f64,
    pub integral_difference: f64,
}

/// Evaluates `i hbar/2 (psi* dpsi - dpsi* psi) - hbar^2/2m |grad psi|^2 - U |psi|^2`
/// and `-[dphi/dt + (grad phi)^2/2m + hbar^2/8m (grad rho/rho)^2 + U] rho`
/// and compares them node-wise and as domain integrals.
pub fn lagrangian_density_check(
    psi: &ComplexScalarField,
    dpsi_dt: &ComplexScalarField,
    potential: &ScalarField,
    hbar: f64,
    mass: f64,
) -> Result<LagrangianReport> {
    let grid = *psi.grid();
    grid.ensure_same(dpsi_dt.grid(), "dpsi/dt")?;
    grid.ensure_same(potential.grid(), "potential")?;
    let rho = psi.density();
    let polar = polar_decompose(psi, hbar, mass, default_floor(&rho))?;
    let dpsi: [Vec<Complex64>; 3] = [0, 1, 2].map(|a| partial(&grid, psi.values(), a));
    let grad_rho = gradient(&rho);
    let grad_phi = gradient(polar.phi());

    let mut l_wave = Vec::with_capacity(grid.len());
    let mut l_polar = Vec::with_capacity(grid.len());
    for i in 0..grid.len() {
        let z = psi.values()[i];
        let zt = dpsi_dt.values()[i];
        let u = potential.values()[i];
        let grad_sq: f64 = dpsi.iter().map(|d| d[i].norm_sqr()).sum();
        let time_term = -hbar * (z.conj() * zt).im;
        l_wave.push(time_term - hbar * hbar / (2.0 * mass) * grad_sq - u * z.norm_sqr());

        let r = rho.values()[i];
        if polar.mask().is_valid(i) {
            let dphi_dt = hbar * (z.conj() * zt).im / r;
            let g = grad_rho.values()[i] / r;
            l_polar.push(
                -(dphi_dt
                    + grad_phi.values()[i].norm_squared() / (2.0 * mass)
                    + hbar * hbar / (8.0 * mass) * g.norm_squared()
                    + u)
                    * r,
            );
        } else {
            l_polar.push(0.0);
        }
    }
    let mask = polar
        .mask()
        .eroded(&grid, 1)
        .and(&NodeMask::interior(&grid, BOUNDARY_LAYER));
    let diff: Vec<f64> = l_wave.iter().zip(&l_polar).map(|(a, b)| a - b).collect();
    let dv = grid.cell_volume();
    let sum_masked = |v: &[f64]| compensated_sum(v.iter().zip(mask.flags()).filter(|(_, &m)| m).map(|(x, _)| *x)) * dv;
    let iw = sum_masked(&l_wave);
    let ip = sum_masked(&l_polar);
    Ok(LagrangianReport {
        pointwise: Norms::of(&diff, &mask, dv),
        integral_wavefunction_form: iw,
        integral_polar_form: ip,
        integral_difference: iw - ip,
    })
}

/// Madelung-fluid diagnostics of one state.
#[derive(Debug, Clone, Serialize)]
pub struct MadelungReport {
    pub label: String,
    pub hbar: f64,
    pub mass: f64,
    pub rho_floor: f64,
    pub masked_nodes: usize,
    pub energy_estimate: f64,
    pub hj_norms: Norms,
    pub continuity_norms: Option<Norms>,
    pub quantum_potential_norms: Norms,
    /// rho-weighted mean momentum with `p = +grad phi`.
    pub mean_momentum_drift: [f64; 3],
    /// Same quantity with the printed sign `p = -grad phi`.
    pub mean_momentum_printed: [f64; 3],
    #[serde(skip)]
    pub hj_residual: MaskedScalar,
    #[serde(skip)]
    pub continuity_residual: Option<MaskedScalar>,
    #[serde(skip)]
    pub quantum_potential: MaskedScalar,
}

impl MadelungReport {
    pub fn evaluate(
        label: impl Into<String>,
        polar: &PolarForm,
        potential: &ScalarField,
        dphi_dt: &ScalarField,
        continuity: Option<MaskedScalar>,
    ) -> Result<Self> {
        let hj = hj_residual(polar, potential, dphi_dt)?;
        let q = quantum_potential(
            polar.rho(),
            polar.hbar(),
            polar.mass(),
            polar.floor(),
            QuantumPotentialForm::DensityGradient,
        );
        let grad_phi = gradient(polar.phi());
        let mask = hj.interior_mask();
        let rho = polar.rho().values();
        let weight = compensated_sum(mask_iter(&mask, rho));
        let energy_density: Vec<f64> = (0..rho.len())
            .map(|i| {
                rho[i]
                    * (grad_phi.values()[i].norm_squared() / (2.0 * polar.mass())
                        + q.field.values()[i]
                        + potential.values()[i])
            })
            .collect();
        let energy = compensated_sum(mask_iter(&mask, &energy_density)) / weight;
        let mut mean_p = [0.0; 3];
        for (a, slot) in mean_p.iter_mut().enumerate() {
            let comp: Vec<f64> = (0..rho.len()).map(|i| rho[i] * grad_phi.values()[i][a]).collect();
            *slot = compensated_sum(mask_iter(&mask, &comp)) / weight;
        }
        Ok(MadelungReport {
            label: label.into(),
            hbar: polar.hbar(),
            mass: polar.mass(),
            rho_floor: polar.floor(),
            masked_nodes: polar.grid().len() - polar.mask().count(),
            energy_estimate: energy,
            hj_norms: hj.interior_norms(),
            continuity_norms: continuity.as_ref().map(MaskedScalar::interior_norms),
            quantum_potential_norms: q.interior_norms(),
            mean_momentum_drift: mean_p,
            mean_momentum_printed: mean_p.map(|v| -v),
            hj_residual: hj,
            continuity_residual: continuity,
            quantum_potential: q,
        })
    }
}

fn mask_iter<'a>(mask: &'a NodeMask, v: &'a [f64]) -> impl Iterator<Item = f64> + 'a {
    v.iter().zip(mask.flags()).filter(|(_, &m)| m).map(|(x, _)| *x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plane_wave(grid: Grid, p: [f64; 3], hbar: f64) -> ComplexScalarField {
        ComplexScalarField::from_fn(grid, |x| {
            Complex64::from_polar(1.0, (p[0] * x[0] + p[1] * x[1] + p[2] * x[2]) / hbar)
        })
        .unwrap()
    }

    #[test]
    fn plane_wave_polar_form() {
        let g = Grid::square(33, -4.0, 4.0).unwrap();
        let p = [1.3, -0.7, 0.0];
        let polar = polar_decompose(&plane_wave(g, p, 1.0), 1.0, 1.0, 1e-12).unwrap();
        for (i, &phi) in polar.phi().values().iter().enumerate() {
            let x = g.position(i);
            let expect = p[0] * x[0] + p[1] * x[1];
            // phase is recovered up to a global 2 pi multiple fixed at the centre
            let off = polar.phi().values()[g.center_index()];
            assert!((phi - off - expect).abs() < 1e-12, "{phi} {expect}");
            assert!((polar.rho().values()[i] - 1.0).abs() < 1e-14);
        }
        for v in momentum_field(&polar).values() {
            assert!((v - Vector3::new(p[0], p[1], 0.0)).norm() < 1e-11);
        }
    }

    #[test]
    fn real_gaussian_has_zero_phase() {
        let g = Grid::line(41, -5.0, 5.0).unwrap();
        let psi = ComplexScalarField::from_fn(g, |x| Complex64::new((-x[0] * x[0] / 2.0).exp(), 0.0)).unwrap();
        let polar = polar_decompose(&psi, 1.0, 1.0, 1e-30).unwrap();
        assert!(polar.phi().values().iter().all(|&p| p == 0.0));
        for (i, &r) in polar.rho().values().iter().enumerate() {
            let x = g.position(i)[0];
            assert!((r - (-x * x).exp()).abs() < 1e-15);
        }
        assert!(momentum_field(&polar).values().iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn all_nodes_below_floor_is_degenerate() {
        let g = Grid::line(9, 0.0, 1.0).unwrap();
        let psi = ComplexScalarField::from_fn(g, |_| Complex64::new(1e-10, 0.0)).unwrap();
        assert!(matches!(
            polar_decompose(&psi, 1.0, 1.0, 1.0),
            Err(Error::DegenerateState { .. })
        ));
    }

    #[test]
    fn vortex_is_rejected() {
        let g = Grid::square(21, -1.0, 1.0).unwrap();
        let psi = ComplexScalarField::from_fn(g, |x| {
            let (a, b) = (x[0] - 0.05, x[1] - 0.05);
            Complex64::new(a, b) * (-(a * a + b * b)).exp()
        })
        .unwrap();
        assert!(matches!(
            polar_decompose(&psi, 1.0, 1.0, 1e-12),
            Err(Error::Vortex { .. })
        ));
    }

    #[test]
    fn uniform_density_has_zero_quantum_potential() {
        let g = Grid::cube(7, 0.0, 1.0).unwrap();
        let rho = ScalarField::constant(g, 0.3);
        for form in [QuantumPotentialForm::DensityGradient, QuantumPotentialForm::Amplitude] {
            let q = quantum_potential(&rho, 1.0, 1.0, 0.0, form);
            assert!(q.field.values().iter().all(|&v| v.abs() < 1e-12));
        }
    }

    #[test]
    fn gaussian_quantum_potential_matches_closed_form() {
        // rho = exp(-x^2 / 2 s^2) gives Q = hbar^2/(4 m s^2) (1 - x^2 / 2 s^2)
        let (s, hbar, m) = (0.8_f64, 1.3, 0.7);
        let errs: Vec<(f64, f64)> = [101, 201, 401]
            .iter()
            .map(|&n| {
                let g = Grid::line(n, -2.5, 2.5).unwrap();
                let rho = ScalarField::from_fn(g, |x| (-x[0] * x[0] / (2.0 * s * s)).exp());
                let q = quantum_potential(&rho, hbar, m, 0.0, QuantumPotentialForm::DensityGradient);
                let err = ScalarField::from_fn(g, |x| {
                    hbar * hbar / (4.0 * m * s * s) * (1.0 - x[0] * x[0] / (2.0 * s * s))
                })
                .zip_with(&q.field, |a, b| a - b)
                .unwrap();
                (g.max_spacing(), Norms::of_scalar(&err, &NodeMask::interior(&g, 2)).max)
            })
            .collect();
        let slope = crate::numeric::convergence_slope(
            &errs.iter().map(|e| e.0).collect::<Vec<_>>(),
            &errs.iter().map(|e| e.1).collect::<Vec<_>>(),
        )
        .unwrap();
        assert!(slope > 1.9, "{slope}");
        assert!(errs[2].1 < 5e-3, "{errs:?}");
    }

    #[test]
    fn quantum_potential_scales_with_hbar_squared_bitwise() {
        let g = Grid::square(17, -2.0, 2.0).unwrap();
        let rho = ScalarField::from_fn(g, |x| (-(x[0] * x[0] + 0.5 * x[1] * x[1])).exp() + 0.1);
        for form in [QuantumPotentialForm::DensityGradient, QuantumPotentialForm::Amplitude] {
            let a = quantum_potential(&rho, 0.7, 1.1, 0.0, form);
            let b = quantum_potential(&rho, 1.4, 1.1, 0.0, form);
            for (x, y) in a.field.values().iter().zip(b.field.values()) {
                assert_eq!(4.0 * x, *y);
            }
        }
    }

    #[test]
    fn plane_wave_hj_and_continuity_vanish() {
        let g = Grid::line(64, -3.0, 3.0).unwrap();
        let p = 0.9;
        let polar = polar_decompose(&plane_wave(g, [p, 0.0, 0.0], 1.0), 1.0, 1.0, 1e-12).unwrap();
        let e = p * p / 2.0;
        let hj = hj_residual(&polar, &ScalarField::constant(g, 0.0), &ScalarField::constant(g, -e)).unwrap();
        assert!(hj.interior_norms().max < 1e-12);
        let rho = polar.rho().clone();
        let c = continuity_residual(&rho, &rho, &polar, 0.01).unwrap();
        assert!(c.interior_norms().max < 1e-12);
        assert!(continuity_residual(&rho, &rho, &polar, 0.0).is_err());
    }

    #[test]
    fn wrong_energy_shifts_hj_uniformly() {
        let g = Grid::line(64, -3.0, 3.0).unwrap();
        let polar = polar_decompose(&plane_wave(g, [0.5, 0.0, 0.0], 1.0), 1.0, 1.0, 1e-12).unwrap();
        let delta = 0.1;
        let hj = hj_residual(
            &polar,
            &ScalarField::constant(g, 0.0),
            &ScalarField::constant(g, -(0.125 + delta)),
        )
        .unwrap();
        for i in (0..g.len()).filter(|&i| hj.interior_mask().is_valid(i)) {
            assert!((hj.field.values()[i] + delta).abs() < 1e-12);
        }
    }

    #[test]
    fn grid_mismatch_is_a_shape_error() {
        let g = Grid::line(16, -1.0, 1.0).unwrap();
        let h = Grid::line(17, -1.0, 1.0).unwrap();
        let polar = polar_decompose(&plane_wave(g, [0.5, 0.0, 0.0], 1.0), 1.0, 1.0, 1e-12).unwrap();
        let r = hj_residual(&polar, &ScalarField::constant(h, 0.0), &ScalarField::constant(g, 0.0));
        assert!(matches!(r, Err(Error::Shape(_))));
    }

    #[test]
    fn lagrangian_forms_agree_for_plane_wave_and_uniform_state() {
        let g = Grid::line(64, -3.0, 3.0).unwrap();
        let p = 0.8;
        let e = p * p / 2.0;
        let psi = plane_wave(g, [p, 0.0, 0.0], 1.0);
        let dpsi = psi.scale(Complex64::new(0.0, -e));
        let u = ScalarField::constant(g, 0.25);
        let r = lagrangian_density_check(&psi, &dpsi, &u, 1.0, 1.0).unwrap();
        // the only gap is the dispersion of the central difference acting on exp(ipx)
        let h = g.max_spacing();
        let dispersion = 0.5 * (p * p - ((p * h).sin() / h).powi(2));
        assert!((r.pointwise.max - dispersion).abs() < 1e-10, "{r:?} {dispersion}");

        let uniform = ComplexScalarField::from_fn(g, |_| Complex64::new(0.6, 0.0)).unwrap();
        let zero = uniform.scale(Complex64::new(0.0, 0.0));
        let r = lagrangian_density_check(&uniform, &zero, &ScalarField::constant(g, 0.0), 1.0, 1.0).unwrap();
        assert!(r.pointwise.max == 0.0 && r.integral_difference == 0.0);
    }

    #[test]
    fn printed_convention_flips_sign() {
        let g = Grid::line(32, -3.0, 3.0).unwrap();
        let polar = polar_decompose(&plane_wave(g, [0.4, 0.0, 0.0], 1.0), 1.0, 1.0, 1e-12).unwrap();
        let a = momentum_field_with(&polar, MomentumConvention::Drift);
        let b = momentum_field_with(&polar, MomentumConvention::Printed);
        for (x, y) in a.values().iter().zip(b.values()) {
            assert_eq!(*x, -y);
        }
    }
}
