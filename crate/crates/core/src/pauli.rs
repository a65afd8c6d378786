//! Two-component (Pauli) spinor fields: spin density, the Pauli current and
//! its split into a convective drift part and a spin (zitterbewegung) part.
//!
//! Spin operator `s^ = (hbar/2) sigma`. For a factorised state
//! `psi = sqrt(rho) exp(i phi/hbar) chi` the current reads
//! `j = rho (grad phi - e A)/m + curl(rho s)/m`, and the internal velocity is
//! `V = curl(rho s)/(m rho)`.

use nalgebra::Vector3;
use num_complex::Complex64;
use serde::Serialize;

use crate::fieldcalc::{
    curl, divergence, gradient, partial, ComplexScalarField, Grid, NodeMask, Norms, ScalarField, VectorField3,
    BOUNDARY_LAYER,
};
use crate::madelung::{default_floor, polar_decompose, DEFAULT_RELATIVE_FLOOR};
use crate::numeric::relative_difference;
use crate::{Constants, Error, Result};

pub type Spinor = [Complex64; 2];

/// `chi^dagger s^ chi` for `s^ = (hbar/2) sigma`.
pub fn spin_expectation(chi: &Spinor, hbar: f64) -> Vector3<f64> {
    let [a, b] = *chi;
    let ab = a.conj() * b;
    Vector3::new(2.0 * ab.re, 2.0 * ab.im, a.norm_sqr() - b.norm_sqr()) * (0.5 * hbar)
}

fn spinor_norm_sqr(chi: &Spinor) -> f64 {
    chi[0].norm_sqr() + chi[1].norm_sqr()
}

/// A constant unit spinor and its spin vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinState {
    chi: Spinor,
    s: Vector3<f64>,
}

impl SpinState {
    /// Normalises `chi`; zero spinors are rejected.
    pub fn new(chi: Spinor, hbar: f64) -> Result<Self> {
        let n = spinor_norm_sqr(&chi).sqrt();
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::Domain("spinor must have non-zero norm".into()));
        }
        let chi = [chi[0] / n, chi[1] / n];
        Ok(SpinState {
            chi,
            s: spin_expectation(&chi, hbar),
        })
    }

    pub fn up(hbar: f64) -> Self {
        SpinState::new([Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)], hbar).expect("unit spinor")
    }

    /// Spin eigenstate along the unit direction `(theta, phi)` on the sphere.
    pub fn along(theta: f64, azimuth: f64, hbar: f64) -> Self {
        let chi = [
            Complex64::new((0.5 * theta).cos(), 0.0),
            Complex64::from_polar((0.5 * theta).sin(), azimuth),
        ];
        SpinState::new(chi, hbar).expect("unit spinor")
    }

    pub fn chi(&self) -> &Spinor {
        &self.chi
    }

    pub fn spin(&self) -> Vector3<f64> {
        self.s
    }
}

#[derive(Debug, Clone)]
pub struct PauliSpinorField {
    grid: Grid,
    values: Vec<Spinor>,
    constants: Constants,
    vector_potential: VectorField3,
}

impl PauliSpinorField {
    pub fn new(
        grid: Grid,
        values: Vec<Spinor>,
        constants: Constants,
        vector_potential: Option<VectorField3>,
    ) -> Result<Self> {
        constants.validate()?;
        if values.len() != grid.len() {
            return Err(Error::Shape(format!(
                "spinor field: {} values for {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().flatten().any(|z| !z.is_finite()) {
            return Err(Error::Domain("non-finite spinor component".into()));
        }
        let vector_potential = match vector_potential {
            Some(a) => {
                grid.ensure_same(a.grid(), "vector potential")?;
                a
            }
            None => VectorField3::zeros(grid),
        };
        Ok(PauliSpinorField {
            grid,
            values,
            constants,
            vector_potential,
        })
    }

    /// `psi(x) = f(x) chi` with a scalar wavefunction `f`.
    pub fn factorized(
        scalar: &ComplexScalarField,
        spin: &SpinState,
        constants: Constants,
        vector_potential: Option<VectorField3>,
    ) -> Result<Self> {
        let chi = spin.chi();
        let values = scalar.values().iter().map(|&f| [f * chi[0], f * chi[1]]).collect();
        PauliSpinorField::new(*scalar.grid(), values, constants, vector_potential)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Spinor] {
        &self.values
    }

    pub fn constants(&self) -> &Constants {
        &self.constants
    }

    pub fn vector_potential(&self) -> &VectorField3 {
        &self.vector_potential
    }

    pub fn component(&self, c: usize) -> Vec<Complex64> {
        self.values.iter().map(|s| s[c]).collect()
    }

    pub fn density(&self) -> ScalarField {
        ScalarField::new(self.grid, self.values.iter().map(spinor_norm_sqr).collect()).expect("same grid")
    }

    /// `psi^dagger s^ psi`, i.e. `rho s`; defined at every node.
    pub fn spin_density(&self) -> VectorField3 {
        let hbar = self.constants.hbar;
        VectorField3::new(
            self.grid,
            self.values.iter().map(|p| spin_expectation(p, hbar)).collect(),
        )
        .expect("same grid")
    }

    pub fn with_global_phase(&self, alpha: f64) -> Self {
        let u = Complex64::from_polar(1.0, alpha);
        PauliSpinorField {
            values: self.values.iter().map(|p| [p[0] * u, p[1] * u]).collect(),
            ..self.clone()
        }
    }

    /// Largest `|Phi^dagger Phi - 1|` over nodes above the floor, with
    /// `Phi = psi / sqrt(rho)`.
    pub fn normalization_defect(&self, floor: f64) -> f64 {
        self.values
            .iter()
            .filter(|p| spinor_norm_sqr(p) >= floor && spinor_norm_sqr(p) > 0.0)
            .map(|p| {
                let r = spinor_norm_sqr(p).sqrt();
                let phi = [p[0] / r, p[1] / r];
                (spinor_norm_sqr(&phi) - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }

    fn floor_mask(&self) -> (ScalarField, NodeMask) {
        let rho = self.density();
        let floor = default_floor(&rho);
        let mask = NodeMask::from_flags(rho.values().iter().map(|&r| r >= floor && r > 0.0).collect());
        (rho, mask)
    }
}

/// A vector field with per-node validity.
#[derive(Debug, Clone)]
pub struct MaskedVector {
    pub field: VectorField3,
    pub mask: NodeMask,
}

impl MaskedVector {
    pub fn interior_norms(&self) -> Norms {
        let m = self.mask.and(&NodeMask::interior(self.field.grid(), BOUNDARY_LAYER));
        Norms::of_vector(&self.field, &m)
    }
}

/// `s = psi^dagger s^ psi / rho`, masked where rho is below the default floor.
pub fn spin_vector_field(psi: &PauliSpinorField) -> MaskedVector {
    let (rho, mask) = psi.floor_mask();
    let hbar = psi.constants().hbar;
    let values = psi
        .values()
        .iter()
        .zip(rho.values())
        .enumerate()
        .map(|(i, (p, &r))| {
            if mask.is_valid(i) {
                spin_expectation(p, hbar) / r
            } else {
                Vector3::zeros()
            }
        })
        .collect();
    MaskedVector {
        field: VectorField3::new(*psi.grid(), values).expect("same grid"),
        mask,
    }
}

/// The three terms of the Pauli current.
#[derive(Debug, Clone)]
pub struct PauliCurrent {
    /// `(i hbar/2m)[(grad psi^dagger) psi - psi^dagger grad psi]`
    pub kinetic: VectorField3,
    /// `-(e A/m) psi^dagger psi`
    pub gauge: VectorField3,
    /// `curl(psi^dagger s^ psi)/m`
    pub spin: VectorField3,
    pub total: VectorField3,
}

pub fn pauli_current(psi: &PauliSpinorField) -> PauliCurrent {
    let grid = *psi.grid();
    let Constants { hbar, mass, charge } = *psi.constants();
    let comps = [psi.component(0), psi.component(1)];
    let mut kinetic = vec![Vector3::zeros(); grid.len()];
    for comp in &comps {
        for axis in 0..3 {
            let d = partial(&grid, comp, axis);
            for (i, k) in kinetic.iter_mut().enumerate() {
                k[axis] += hbar / mass * (comp[i].conj() * d[i]).im;
            }
        }
    }
    let kinetic = VectorField3::new(grid, kinetic).expect("same grid");
    let rho = psi.density();
    let gauge = psi
        .vector_potential()
        .scaled_by(&rho)
        .expect("same grid")
        .map(|a| a * (-charge / mass));
    let spin = curl(&psi.spin_density()).map(|c| c / mass);
    let total = kinetic
        .zip_with(&gauge, |a, b| a + b)
        .and_then(|t| t.zip_with(&spin, |a, b| a + b))
        .expect("same grid");
    PauliCurrent {
        kinetic,
        gauge,
        spin,
        total,
    }
}

/// How the drift momentum of a spinor field was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MomentumRoute {
    /// Uniform spin: `p = grad phi` from the unwrapped phase of `chi^dagger psi`.
    Factorized,
    /// Non-uniform spin: `p = hbar Im(Phi^dagger grad Phi)`.
    Local,
}

#[derive(Debug, Clone)]
pub struct CurrentDecomposition {
    pub route: MomentumRoute,
    pub j_total: VectorField3,
    pub j_convective: VectorField3,
    pub j_spin: VectorField3,
    /// Internal (zitterbewegung) velocity `V = j_spin / rho`.
    pub zbw_velocity: VectorField3,
    /// Drift velocity `w = (p - e A)/m`.
    pub drift_velocity: VectorField3,
    pub mask: NodeMask,
    /// `j_total - (j_convective + j_spin)` on the interior.
    pub residual: Norms,
    /// `div(j_spin)` on the interior.
    pub spin_divergence: Norms,
}

/// Relative spread below which the spin field counts as uniform.
const UNIFORM_SPIN_TOL: f64 = 1e-9;

pub fn decompose_current(psi: &PauliSpinorField) -> Result<CurrentDecomposition> {
    let grid = *psi.grid();
    let Constants { hbar, mass, charge } = *psi.constants();
    let (rho, floor_mask) = psi.floor_mask();
    let s = spin_vector_field(psi);
    let peak = (0..grid.len())
        .max_by(|&a, &b| rho.values()[a].total_cmp(&rho.values()[b]))
        .expect("non-empty grid");
    let s_ref = s.field.values()[peak];
    let uniform = (0..grid.len())
        .filter(|&i| floor_mask.is_valid(i))
        .all(|i| (s.field.values()[i] - s_ref).norm() <= UNIFORM_SPIN_TOL * (0.5 * hbar));

    let (route, momentum, mask) = if uniform {
        let p = psi.values()[peak];
        let r = rho.values()[peak].sqrt();
        let chi_ref = [p[0] / r, p[1] / r];
        let projected = ComplexScalarField::new(
            grid,
            psi.values()
                .iter()
                .map(|v| chi_ref[0].conj() * v[0] + chi_ref[1].conj() * v[1])
                .collect(),
        )?;
        let polar = polar_decompose(&projected, hbar, mass, DEFAULT_RELATIVE_FLOOR * rho.values()[peak])?;
        let mask = polar.mask().eroded(&grid, 1).and(&floor_mask);
        (MomentumRoute::Factorized, gradient(polar.phi()), mask)
    } else {
        let kinetic = pauli_current(psi).kinetic;
        let p = (0..grid.len())
            .map(|i| {
                if floor_mask.is_valid(i) {
                    kinetic.values()[i] * (mass / rho.values()[i])
                } else {
                    Vector3::zeros()
                }
            })
            .collect();
        (MomentumRoute::Local, VectorField3::new(grid, p)?, floor_mask.clone())
    };

    let a = psi.vector_potential();
    let drift: Vec<Vector3<f64>> = (0..grid.len())
        .map(|i| {
            if mask.is_valid(i) {
                (momentum.values()[i] - a.values()[i] * charge) / mass
            } else {
                Vector3::zeros()
            }
        })
        .collect();
    let drift = VectorField3::new(grid, drift)?;
    let j_convective = drift.scaled_by(&rho)?;
    let j_spin = curl(&psi.spin_density()).map(|c| c / mass);
    let zbw: Vec<Vector3<f64>> = (0..grid.len())
        .map(|i| {
            if mask.is_valid(i) {
                j_spin.values()[i] / rho.values()[i]
            } else {
                Vector3::zeros()
            }
        })
        .collect();
    let zbw_velocity = VectorField3::new(grid, zbw)?;
    let j_total = pauli_current(psi).total;

    let interior = mask.and(&NodeMask::interior(&grid, BOUNDARY_LAYER));
    let residual = j_total
        .zip_with(&j_convective, |t, c| t - c)?
        .zip_with(&j_spin, |r, s| r - s)?;
    let spin_div = divergence(&j_spin);
    Ok(CurrentDecomposition {
        route,
        residual: Norms::of_vector(&residual, &interior),
        spin_divergence: Norms::of_scalar(&spin_div, &NodeMask::interior(&grid, BOUNDARY_LAYER)),
        j_total,
        j_convective,
        j_spin,
        zbw_velocity,
        drift_velocity: drift,
        mask,
    })
}

/// `V^2` for constant spin evaluated directly and through the Lagrange
/// identity.
#[derive(Debug, Clone, Serialize)]
pub struct VsqReport {
    /// Max node-wise `|V^2_direct - s^2 (grad rho/m rho)^2| / (s^2 (grad rho/m rho)^2)`.
    pub identity_relative_error: f64,
    /// Max `|grad rho . s| / (|grad rho| |s|)`.
    pub orthogonality_defect: f64,
    /// Max node-wise `|gap - (grad rho . s)^2/(m rho)^2|` relative to
    /// `s^2 (grad rho/m rho)^2`, where `gap` is the identity violation.
    pub violation_model_error: f64,
    /// Largest identity violation seen (absolute).
    pub max_violation: f64,
    pub nodes: usize,
}

pub fn vsq_identity_check(rho: &ScalarField, s: Vector3<f64>, mass: f64) -> VsqReport {
    let grid = *rho.grid();
    let floor = default_floor(rho);
    let grad = gradient(rho);
    let mask = NodeMask::from_flags(rho.values().iter().map(|&r| r >= floor && r > 0.0).collect())
        .and(&NodeMask::interior(&grid, BOUNDARY_LAYER));
    let s2 = s.norm_squared();
    let mut scale_max = 0.0_f64;
    let mut rows = Vec::new();
    for i in (0..grid.len()).filter(|&i| mask.is_valid(i)) {
        let g = grad.values()[i];
        let mr = mass * rho.values()[i];
        let v = g.cross(&s) / mr;
        let direct = v.norm_squared();
        let lagrange = s2 * (g / mr).norm_squared();
        let predicted_gap = (g.dot(&s) / mr).powi(2);
        let defect = if g.norm() > 0.0 && s2 > 0.0 {
            g.dot(&s).abs() / (g.norm() * s2.sqrt())
        } else {
            0.0
        };
        scale_max = scale_max.max(lagrange);
        rows.push((direct, lagrange, predicted_gap, defect));
    }
    let tiny = f64::EPSILON * scale_max;
    let mut report = VsqReport {
        identity_relative_error: 0.0,
        orthogonality_defect: 0.0,
        violation_model_error: 0.0,
        max_violation: 0.0,
        nodes: rows.len(),
    };
    for (direct, lagrange, predicted, defect) in rows {
        let gap = lagrange - direct;
        report.identity_relative_error = report
            .identity_relative_error
            .max(relative_difference(direct, lagrange, tiny));
        report.violation_model_error = report
            .violation_model_error
            .max((gap - predicted).abs() / lagrange.max(tiny));
        report.max_violation = report.max_violation.max(gap.abs());
        report.orthogonality_defect = report.orthogonality_defect.max(defect);
    }
    report
}

/// Internal kinetic energy `m V^2 / 2` against the non-classical lagrangian
/// term `(hbar^2/8m)(grad rho/rho)^2`.
#[derive(Debug, Clone, Serialize)]
pub struct KoenigReport {
    pub spin_magnitude: f64,
    /// `(2|s|/hbar)^2`, the ratio the two terms must show.
    pub expected_ratio: f64,
    pub ratio_min: f64,
    pub ratio_max: f64,
    /// Max node-wise relative difference between the two terms.
    pub max_relative_difference: f64,
    /// rho-weighted mean of the drift kinetic energy `(grad phi)^2/2m`.
    pub mean_drift_kinetic: f64,
    pub orthogonality_defect: f64,
    pub nodes: usize,
}

pub fn koenig_split_check(
    rho: &ScalarField,
    phi: &ScalarField,
    s: Vector3<f64>,
    hbar: f64,
    mass: f64,
) -> Result<KoenigReport> {
    let grid = *rho.grid();
    grid.ensure_same(phi.grid(), "phase")?;
    let floor = default_floor(rho);
    let grad = gradient(rho);
    let grad_phi = gradient(phi);
    let mask = NodeMask::from_flags(rho.values().iter().map(|&r| r >= floor && r > 0.0).collect())
        .and(&NodeMask::interior(&grid, BOUNDARY_LAYER));
    let scale = (0..grid.len())
        .filter(|&i| mask.is_valid(i))
        .map(|i| (grad.values()[i] / rho.values()[i]).norm_squared())
        .fold(0.0, f64::max);
    let tiny = 1e3 * f64::EPSILON * scale;
    let mut out = KoenigReport {
        spin_magnitude: s.norm(),
        expected_ratio: (2.0 * s.norm() / hbar).powi(2),
        ratio_min: f64::INFINITY,
        ratio_max: f64::NEG_INFINITY,
        max_relative_difference: 0.0,
        mean_drift_kinetic: 0.0,
        orthogonality_defect: 0.0,
        nodes: 0,
    };
    let (mut wsum, mut ksum) = (0.0, 0.0);
    for i in (0..grid.len()).filter(|&i| mask.is_valid(i)) {
        let r = rho.values()[i];
        let g = grad.values()[i];
        let v = g.cross(&s) / (mass * r);
        let internal = 0.5 * mass * v.norm_squared();
        let u = g / r;
        let lagrangian = hbar * hbar / (8.0 * mass) * u.norm_squared();
        out.nodes += 1;
        wsum += r;
        ksum += r * grad_phi.values()[i].norm_squared() / (2.0 * mass);
        if g.norm() > 0.0 && s.norm() > 0.0 {
            out.orthogonality_defect = out.orthogonality_defect.max(g.dot(&s).abs() / (g.norm() * s.norm()));
        }
        if u.norm_squared() > tiny {
            let ratio = internal / lagrangian;
            out.ratio_min = out.ratio_min.min(ratio);
            out.ratio_max = out.ratio_max.max(ratio);
            out.max_relative_difference = out
                .max_relative_difference
                .max(relative_difference(internal, lagrangian, 0.0));
        }
    }
    if out.ratio_min > out.ratio_max {
        // no node with a density gradient: both terms vanish
        out.ratio_min = out.expected_ratio;
        out.ratio_max = out.expected_ratio;
    }
    out.mean_drift_kinetic = if wsum > 0.0 { ksum / wsum } else { 0.0 };
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TakabayasiBranch {
    /// `beta = asin(..)`, giving 0 for a pure electron.
    Electron,
    /// `beta = pi - asin(..)`, giving pi for a pure positron.
    Positron,
}

#[derive(Debug, Clone)]
pub struct TakabayasiField {
    pub beta: ScalarField,
    pub mask: NodeMask,
    /// Nodes with `|sin beta|` past 1 by no more than the tolerance.
    pub clamped: usize,
    /// Nodes with `|sin beta|` beyond `1 + tolerance`; left masked.
    pub violations: usize,
}

/// `beta` from `div(rho s) = -m rho sin(beta)`.
pub fn takabayasi_beta(
    rho: &ScalarField,
    s_field: &VectorField3,
    mass: f64,
    branch: TakabayasiBranch,
    tolerance: f64,
) -> Result<TakabayasiField> {
    let grid = *rho.grid();
    grid.ensure_same(s_field.grid(), "spin field")?;
    let floor = default_floor(rho);
    let div = divergence(&s_field.scaled_by(rho)?);
    let mut mask = Vec::with_capacity(grid.len());
    let (mut clamped, mut violations) = (0, 0);
    let values = (0..grid.len())
        .map(|i| {
            let r = rho.values()[i];
            if !(r >= floor && r > 0.0) {
                mask.push(false);
                return 0.0;
            }
            let mut arg = -div.values()[i] / (mass * r);
            if arg.abs() > 1.0 {
                if arg.abs() - 1.0 <= tolerance {
                    clamped += 1;
                    arg = arg.clamp(-1.0, 1.0);
                } else {
                    violations += 1;
                    mask.push(false);
                    return 0.0;
                }
            }
            mask.push(true);
            match branch {
                TakabayasiBranch::Electron => arg.asin(),
                TakabayasiBranch::Positron => std::f64::consts::PI - arg.asin(),
            }
        })
        .collect();
    Ok(TakabayasiField {
        beta: ScalarField::new(grid, values)?,
        mask: NodeMask::from_flags(mask),
        clamped,
        violations,
    })
}

/// `nu = |s| / m`.
pub fn diffusion_coefficient(spin_magnitude: f64, mass: f64) -> Result<f64> {
    if !(mass > 0.0) {
        return Err(Error::Domain(format!("mass must be positive, got {mass}")));
    }
    if !(spin_magnitude >= 0.0) {
        return Err(Error::Domain(format!(
            "spin magnitude must be non-negative, got {spin_magnitude}"
        )));
    }
    Ok(spin_magnitude / mass)
}
