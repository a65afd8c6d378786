//! Analytic initial states and a Crank-Nicolson propagator for
//! `i hbar d_t psi = [-hbar^2/(2m) lap + U] psi` inside a hard-wall box.
//!
//! The discrete hamiltonian uses the 3-point Laplacian with zero ghost nodes,
//! so it is Hermitian and the Cayley step is unitary up to the linear solve.
//! One active axis is solved exactly with the Thomas algorithm; more axes use
//! Jacobi iteration, which contracts for any `U >= 0` under the step bound.

use num_complex::Complex64;
use serde::Serialize;

use crate::fieldcalc::{ComplexScalarField, Grid, ScalarField};
use crate::madelung::{default_floor, polar_decompose, MaskedScalar, PolarForm};
use crate::numeric::compensated_sum;
use crate::{Error, Result};

/// `|psi|` on the box boundary must stay below this fraction of `max |psi|`.
pub const CONTAINMENT_LIMIT: f64 = 1e-8;

/// Margin applied to `h^2 m / hbar` when validating a time step.
pub const STABILITY_MARGIN: f64 = 0.5;

const JACOBI_TOL: f64 = 2e-15;
const JACOBI_MAX_ITER: usize = 5000;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum StatePreset {
    PlaneWave {
        momentum: [f64; 3],
    },
    GaussianPacket {
        sigma: f64,
        momentum: [f64; 3],
        center: [f64; 3],
    },
    /// Product of oscillator eigenfunctions, one quantum number per axis.
    HoEigenstate {
        quanta: [usize; 3],
        omega: f64,
    },
}

impl StatePreset {
    pub fn ho_ground(omega: f64) -> Self {
        StatePreset::HoEigenstate { quanta: [0; 3], omega }
    }

    /// Exact energy where the preset is an eigenstate of the continuum problem.
    pub fn energy(&self, grid: &Grid, hbar: f64, mass: f64) -> Option<f64> {
        match self {
            StatePreset::PlaneWave { momentum } => {
                let p2: f64 = (0..3)
                    .filter(|&a| grid.is_active(a))
                    .map(|a| momentum[a] * momentum[a])
                    .sum();
                Some(p2 / (2.0 * mass))
            }
            StatePreset::GaussianPacket { .. } => None,
            StatePreset::HoEigenstate { quanta, omega } => Some(
                (0..3)
                    .filter(|&a| grid.is_active(a))
                    .map(|a| hbar * omega * (quanta[a] as f64 + 0.5))
                    .sum(),
            ),
        }
    }

    /// The potential the preset is meant to live in.
    pub fn natural_potential(&self) -> Potential {
        match self {
            StatePreset::HoEigenstate { omega, .. } => Potential::Harmonic { omega: *omega },
            _ => Potential::Free,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Potential {
    Free,
    /// `U = m omega^2 |x|^2 / 2` about the origin.
    Harmonic {
        omega: f64,
    },
    Custom(#[serde(skip)] ScalarField),
}

impl Potential {
    pub fn sample(&self, grid: &Grid, mass: f64) -> Result<ScalarField> {
        match self {
            Potential::Free => Ok(ScalarField::constant(*grid, 0.0)),
            Potential::Harmonic { omega } => Ok(ScalarField::from_fn(*grid, |x| {
                let r2: f64 = (0..3).filter(|&a| grid.is_active(a)).map(|a| x[a] * x[a]).sum();
                0.5 * mass * omega * omega * r2
            })),
            Potential::Custom(u) => {
                grid.ensure_same(u.grid(), "potential")?;
                if u.values().iter().any(|v| !v.is_finite()) {
                    return Err(Error::Config("potential has non-finite values".into()));
                }
                Ok(u.clone())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvolutionConfig {
    pub dt: f64,
    pub steps: usize,
    pub potential: Potential,
}

impl EvolutionConfig {
    pub fn new(dt: f64, steps: usize, potential: Potential) -> Self {
        EvolutionConfig { dt, steps, potential }
    }

    /// Largest admissible step on `grid`.
    pub fn stability_bound(grid: &Grid, hbar: f64, mass: f64) -> f64 {
        let h = (0..3)
            .filter(|&a| grid.is_active(a))
            .map(|a| grid.spacing()[a])
            .fold(f64::INFINITY, f64::min);
        STABILITY_MARGIN * h * h * mass / hbar
    }

    pub fn validate(&self, grid: &Grid, hbar: f64, mass: f64) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Config(format!("dt must be positive, got {}", self.dt)));
        }
        check_step(self.dt, grid, hbar, mass)
    }
}

fn check_step(dt: f64, grid: &Grid, hbar: f64, mass: f64) -> Result<()> {
    if !(hbar > 0.0 && mass > 0.0) {
        return Err(Error::Config("hbar and mass must be positive".into()));
    }
    let bound = EvolutionConfig::stability_bound(grid, hbar, mass);
    if dt.abs() > bound {
        return Err(Error::Stability { dt: dt.abs(), bound });
    }
    Ok(())
}

fn hermite(n: usize, x: f64) -> f64 {
    let (mut h0, mut h1) = (1.0, 2.0 * x);
    if n == 0 {
        return h0;
    }
    for k in 1..n {
        let h2 = 2.0 * x * h1 - 2.0 * k as f64 * h0;
        h0 = h1;
        h1 = h2;
    }
    h1
}

/// Builds the preset on `grid`. Localised states are normalised so that
/// `sum |psi|^2 dV = 1` and must be contained by the box.
pub fn make_state(preset: &StatePreset, grid: &Grid, hbar: f64, mass: f64) -> Result<ComplexScalarField> {
    if !(hbar > 0.0 && mass > 0.0) {
        return Err(Error::Config("hbar and mass must be positive".into()));
    }
    let active: Vec<usize> = (0..3).filter(|&a| grid.is_active(a)).collect();
    let psi = match preset {
        StatePreset::PlaneWave { momentum } => {
            return ComplexScalarField::from_fn(*grid, |x| {
                let phase: f64 = active.iter().map(|&a| momentum[a] * x[a]).sum();
                Complex64::from_polar(1.0, phase / hbar)
            });
        }
        StatePreset::GaussianPacket {
            sigma,
            momentum,
            center,
        } => {
            if !(*sigma > 0.0) {
                return Err(Error::Config(format!("packet width must be positive, got {sigma}")));
            }
            ComplexScalarField::from_fn(*grid, |x| {
                let (mut r2, mut phase) = (0.0, 0.0);
                for &a in &active {
                    let d = x[a] - center[a];
                    r2 += d * d;
                    phase += momentum[a] * d;
                }
                Complex64::from_polar((-r2 / (4.0 * sigma * sigma)).exp(), phase / hbar)
            })?
        }
        StatePreset::HoEigenstate { quanta, omega } => {
            if !(*omega > 0.0) {
                return Err(Error::Config(format!(
                    "oscillator frequency must be positive, got {omega}"
                )));
            }
            let k = (mass * omega / hbar).sqrt();
            ComplexScalarField::from_fn(*grid, |x| {
                let amp: f64 = active
                    .iter()
                    .map(|&a| {
                        let xi = k * x[a];
                        hermite(quanta[a], xi) * (-0.5 * xi * xi).exp()
                    })
                    .product();
                Complex64::new(amp, 0.0)
            })?
        }
    };
    check_containment(&psi)?;
    let n = psi.norm_sqr();
    Ok(psi.scale(Complex64::new(1.0 / n.sqrt(), 0.0)))
}

/// Half-width of a box that contains a Gaussian envelope
/// `exp(-x^2 / (2 scale^2))` to [`CONTAINMENT_LIMIT`], with a 2% margin.
pub fn contained_half_width(scale: f64) -> f64 {
    1.02 * scale * (2.0 * (1.0 / CONTAINMENT_LIMIT).ln()).sqrt()
}

/// Fails when the boundary amplitude exceeds [`CONTAINMENT_LIMIT`] of the peak.
pub fn check_containment(psi: &ComplexScalarField) -> Result<()> {
    let grid = psi.grid();
    let peak = psi.values().iter().map(|z| z.norm()).fold(0.0, f64::max);
    if peak == 0.0 {
        return Err(Error::DegenerateState { floor: 0.0 });
    }
    let edge = (0..grid.len())
        .filter(|&i| grid.is_boundary(i))
        .map(|i| psi.values()[i].norm())
        .fold(0.0, f64::max);
    let ratio = edge / peak;
    if ratio >= CONTAINMENT_LIMIT {
        return Err(Error::Containment {
            ratio,
            limit: CONTAINMENT_LIMIT,
        });
    }
    Ok(())
}

/// The discrete hamiltonian for fixed grid, potential and constants.
struct Hamiltonian {
    grid: Grid,
    u: Vec<f64>,
    /// `hbar^2 / (2 m h_a^2)` per active axis, zero otherwise.
    kin: [f64; 3],
}

impl Hamiltonian {
    fn new(grid: &Grid, potential: &Potential, hbar: f64, mass: f64) -> Result<Self> {
        let u = potential.sample(grid, mass)?.into_values();
        let mut kin = [0.0; 3];
        for (a, k) in kin.iter_mut().enumerate() {
            if grid.is_active(a) {
                let h = grid.spacing()[a];
                *k = hbar * hbar / (2.0 * mass * h * h);
            }
        }
        Ok(Hamiltonian { grid: *grid, u, kin })
    }

    fn diag(&self, i: usize) -> f64 {
        2.0 * self.kin.iter().sum::<f64>() + self.u[i]
    }

    /// Sum over both neighbours on every active axis, ghosts are zero.
    fn neighbour_sum(&self, psi: &[Complex64], i: usize, axis: usize) -> Complex64 {
        let n = self.grid.dims()[axis];
        let s = self.grid.strides()[axis];
        let c = self.grid.coords(i)[axis];
        let mut acc = Complex64::new(0.0, 0.0);
        if c > 0 {
            acc += psi[i - s];
        }
        if c + 1 < n {
            acc += psi[i + s];
        }
        acc
    }

    fn apply(&self, psi: &[Complex64]) -> Vec<Complex64> {
        (0..psi.len())
            .map(|i| {
                let mut out = psi[i] * self.diag(i);
                for a in 0..3 {
                    if self.kin[a] > 0.0 {
                        out -= self.neighbour_sum(psi, i, a) * self.kin[a];
                    }
                }
                out
            })
            .collect()
    }

    /// Solves `(1 + i dt H / 2 hbar) psi' = (1 - i dt H / 2 hbar) psi`.
    fn cayley(&self, psi: &[Complex64], dt: f64, hbar: f64) -> Result<Vec<Complex64>> {
        let c = Complex64::new(0.0, 0.5 * dt / hbar);
        let hpsi = self.apply(psi);
        let rhs: Vec<Complex64> = psi.iter().zip(&hpsi).map(|(p, h)| p - c * h).collect();
        let active: Vec<usize> = (0..3).filter(|&a| self.grid.is_active(a)).collect();
        if active.len() == 1 {
            Ok(self.thomas(&rhs, c, active[0]))
        } else {
            self.jacobi(&rhs, c, psi)
        }
    }

    /// Nodes are contiguous in index order when only one axis is active.
    fn thomas(&self, rhs: &[Complex64], c: Complex64, axis: usize) -> Vec<Complex64> {
        let n = rhs.len();
        let off = -c * self.kin[axis];
        let mut cp = vec![Complex64::new(0.0, 0.0); n];
        let mut dp = vec![Complex64::new(0.0, 0.0); n];
        let b0 = 1.0 + c * self.diag(0);
        cp[0] = off / b0;
        dp[0] = rhs[0] / b0;
        for i in 1..n {
            let denom = 1.0 + c * self.diag(i) - off * cp[i - 1];
            cp[i] = off / denom;
            dp[i] = (rhs[i] - off * dp[i - 1]) / denom;
        }
        let mut x = dp;
        for i in (0..n - 1).rev() {
            let next = x[i + 1];
            x[i] -= cp[i] * next;
        }
        x
    }

    fn jacobi(&self, rhs: &[Complex64], c: Complex64, guess: &[Complex64]) -> Result<Vec<Complex64>> {
        let mut x = guess.to_vec();
        let mut next = vec![Complex64::new(0.0, 0.0); x.len()];
        for _ in 0..JACOBI_MAX_ITER {
            let mut delta = 0.0_f64;
            let mut scale = 0.0_f64;
            for i in 0..x.len() {
                let mut acc = rhs[i];
                for a in 0..3 {
                    if self.kin[a] > 0.0 {
                        acc += c * self.kin[a] * self.neighbour_sum(&x, i, a);
                    }
                }
                next[i] = acc / (1.0 + c * self.diag(i));
                delta = delta.max((next[i] - x[i]).norm());
                scale = scale.max(next[i].norm());
            }
            std::mem::swap(&mut x, &mut next);
            if delta <= JACOBI_TOL * scale {
                return Ok(x);
            }
        }
        Err(Error::Domain(format!(
            "implicit solve did not converge in {JACOBI_MAX_ITER} iterations"
        )))
    }
}

fn propagate(
    psi: &ComplexScalarField,
    dt: f64,
    potential: &Potential,
    hbar: f64,
    mass: f64,
) -> Result<ComplexScalarField> {
    let grid = psi.grid();
    check_step(dt, grid, hbar, mass)?;
    let h = Hamiltonian::new(grid, potential, hbar, mass)?;
    ComplexScalarField::new(*grid, h.cayley(psi.values(), dt, hbar)?)
}

/// Advances `psi` by `config.steps` steps of size `config.dt`.
pub fn step(psi: &ComplexScalarField, config: &EvolutionConfig, hbar: f64, mass: f64) -> Result<ComplexScalarField> {
    Ok(run(psi, config, hbar, mass)?.psi)
}

/// Result of a run with its norm and energy timelines (one entry per step,
/// starting with the initial state).
#[derive(Debug, Clone)]
pub struct Evolution {
    pub psi: ComplexScalarField,
    pub timeline: Timeline,
}

#[derive(Debug, Clone, Serialize)]
pub struct Timeline {
    pub times: Vec<f64>,
    pub norms: Vec<f64>,
    pub energies: Vec<f64>,
}

impl Timeline {
    pub fn max_norm_drift(&self) -> f64 {
        let n0 = self.norms[0];
        self.norms.iter().map(|n| (n - n0).abs()).fold(0.0, f64::max)
    }

    pub fn max_step_norm_drift(&self) -> f64 {
        self.norms.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0, f64::max)
    }

    pub fn max_relative_energy_drift(&self) -> f64 {
        let e0 = self.energies[0];
        let scale = e0.abs().max(f64::MIN_POSITIVE);
        self.energies.iter().map(|e| (e - e0).abs() / scale).fold(0.0, f64::max)
    }
}

pub fn run(psi: &ComplexScalarField, config: &EvolutionConfig, hbar: f64, mass: f64) -> Result<Evolution> {
    let grid = *psi.grid();
    config.validate(&grid, hbar, mass)?;
    let h = Hamiltonian::new(&grid, &config.potential, hbar, mass)?;
    let mut values = psi.values().to_vec();
    let mut timeline = Timeline {
        times: vec![0.0],
        norms: vec![psi.norm_sqr()],
        energies: vec![expectation(&h, &values)],
    };
    for k in 1..=config.steps {
        values = h.cayley(&values, config.dt, hbar)?;
        let current = ComplexScalarField::new(grid, values.clone())?;
        timeline.times.push(k as f64 * config.dt);
        timeline.norms.push(current.norm_sqr());
        timeline.energies.push(expectation(&h, &values));
    }
    Ok(Evolution {
        psi: ComplexScalarField::new(grid, values)?,
        timeline,
    })
}

fn expectation(h: &Hamiltonian, psi: &[Complex64]) -> f64 {
    let hpsi = h.apply(psi);
    let num = compensated_sum(psi.iter().zip(&hpsi).map(|(p, q)| (p.conj() * q).re));
    let den = compensated_sum(psi.iter().map(|p| p.norm_sqr()));
    num / den
}

/// `<psi|H|psi> / <psi|psi>` with the propagator's discrete hamiltonian.
pub fn energy(psi: &ComplexScalarField, potential: &Potential, hbar: f64, mass: f64) -> Result<f64> {
    let h = Hamiltonian::new(psi.grid(), potential, hbar, mass)?;
    Ok(expectation(&h, psi.values()))
}

/// Centred time-derivative ingredients at the time of `psi`.
#[derive(Debug, Clone)]
pub struct Snapshot {
    /// Density half a step earlier.
    pub rho_before: ScalarField,
    /// Density half a step later.
    pub rho_after: ScalarField,
    pub polar: PolarForm,
    /// `hbar arg(psi_+ conj psi_-) / dt`.
    pub dphi_dt: ScalarField,
    pub dt: f64,
}

impl Snapshot {
    pub fn drho_dt(&self) -> ScalarField {
        self.rho_after
            .zip_with(&self.rho_before, |a, b| (a - b) / self.dt)
            .expect("same grid")
    }

    pub fn continuity_residual(&self) -> Result<MaskedScalar> {
        crate::madelung::continuity_residual(&self.rho_before, &self.rho_after, &self.polar, self.dt)
    }
}

/// Propagates `psi` half a step forwards and backwards with `config.dt`.
pub fn snapshot_pair(psi: &ComplexScalarField, config: &EvolutionConfig, hbar: f64, mass: f64) -> Result<Snapshot> {
    let grid = *psi.grid();
    config.validate(&grid, hbar, mass)?;
    let half = 0.5 * config.dt;
    let after = propagate(psi, half, &config.potential, hbar, mass)?;
    let before = propagate(psi, -half, &config.potential, hbar, mass)?;
    let dphi = after
        .values()
        .iter()
        .zip(before.values())
        .map(|(a, b)| hbar * (a * b.conj()).arg() / config.dt)
        .collect();
    let rho = psi.density();
    let polar = polar_decompose(psi, hbar, mass, default_floor(&rho))?;
    Ok(Snapshot {
        rho_before: before.density(),
        rho_after: after.density(),
        polar,
        dphi_dt: ScalarField::new(grid, dphi)?,
        dt: config.dt,
    })
}
