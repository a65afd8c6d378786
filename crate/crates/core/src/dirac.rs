//! Gamma matrices in the Dirac representation, positive-energy plane-wave
//! spinors and the Gordon split of the Dirac current.
//!
//! Everything is evaluated point-wise and in closed form: a superposition
//! `psi(x) = sum_k c_k u_k exp(-i p_k.x)` is differentiated analytically, so
//! the identities hold to rounding.
//!
//! Spinors are normalised to `ubar u = 1`, which makes `p.j = m` for a
//! single unit-amplitude wave.

use nalgebra::{Matrix4, Vector3, Vector4};
use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::relkin::FourVector;
use crate::{Error, Result};

pub type Spinor4 = Vector4<Complex64>;
pub type Gamma = Matrix4<Complex64>;

/// Relative tolerance on `p.p = m^2`.
pub const ON_SHELL_TOL: f64 = 1e-12;

const METRIC: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GammaAlgebra {
    gamma: [Gamma; 4],
}

impl Default for GammaAlgebra {
    fn default() -> Self {
        GammaAlgebra::dirac()
    }
}

impl GammaAlgebra {
    /// `gamma^0 = diag(1, -1)`, `gamma^k = [[0, sigma_k], [-sigma_k, 0]]`.
    pub fn dirac() -> Self {
        let (o, l, i) = (c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0));
        let g0 = Gamma::from_diagonal(&Vector4::new(l, l, -l, -l));
        let sigma = [[[o, l], [l, o]], [[o, -i], [i, o]], [[l, o], [o, -l]]];
        let mut gamma = [g0, Gamma::zeros(), Gamma::zeros(), Gamma::zeros()];
        for k in 0..3 {
            for r in 0..2 {
                for s in 0..2 {
                    gamma[k + 1][(r, s + 2)] = sigma[k][r][s];
                    gamma[k + 1][(r + 2, s)] = -sigma[k][r][s];
                }
            }
        }
        GammaAlgebra { gamma }
    }

    pub fn gamma(&self, mu: usize) -> &Gamma {
        &self.gamma[mu]
    }

    /// `gamma^mu p_mu`.
    pub fn slash(&self, p: &FourVector) -> Gamma {
        self.gamma[0] * c(p.t, 0.0) - (0..3).fold(Gamma::zeros(), |acc, k| acc + self.gamma[k + 1] * c(p.x[k], 0.0))
    }

    /// `S^{mu nu} = (i/4)(gamma^mu gamma^nu - gamma^nu gamma^mu)`.
    pub fn spin_tensor(&self, mu: usize, nu: usize) -> Gamma {
        let (a, b) = (&self.gamma[mu], &self.gamma[nu]);
        (a * b - b * a) * c(0.0, 0.25)
    }

    /// Largest entry of `{gamma^mu, gamma^nu} - 2 g^{mu nu}`.
    pub fn anticommutator_defect(&self) -> f64 {
        let mut worst = 0.0_f64;
        for (mu, (a, g)) in self.gamma.iter().zip(METRIC).enumerate() {
            for (nu, b) in self.gamma.iter().enumerate() {
                let mut m = a * b + b * a;
                if mu == nu {
                    m -= Gamma::identity() * c(2.0 * g, 0.0);
                }
                worst = worst.max(m.iter().map(|z| z.norm()).fold(0.0, f64::max));
            }
        }
        worst
    }

    /// Largest entry of `gamma^0 - gamma^0^dagger` and `gamma^k + gamma^k^dagger`.
    pub fn hermiticity_defect(&self) -> f64 {
        (0..4)
            .map(|mu| {
                let d = self.gamma[mu].adjoint() * c(METRIC[mu], 0.0) - self.gamma[mu];
                d.iter().map(|z| z.norm()).fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }

    /// Largest entry of `S^{mu nu} + S^{nu mu}`.
    pub fn spin_tensor_antisymmetry_defect(&self) -> f64 {
        let mut worst = 0.0_f64;
        for mu in 0..4 {
            for nu in 0..4 {
                let s = self.spin_tensor(mu, nu) + self.spin_tensor(nu, mu);
                worst = worst.max(s.iter().map(|z| z.norm()).fold(0.0, f64::max));
            }
        }
        worst
    }

    /// `ubar = u^dagger gamma^0` applied to `M v`.
    pub fn bilinear(&self, u: &Spinor4, m: &Gamma, v: &Spinor4) -> Complex64 {
        (u.adjoint() * self.gamma[0] * m * v)[(0, 0)]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    fn chi(self) -> [Complex64; 2] {
        match self {
            Spin::Up => [c(1.0, 0.0), c(0.0, 0.0)],
            Spin::Down => [c(0.0, 0.0), c(1.0, 0.0)],
        }
    }
}

/// On-shell momentum with spatial part `p` and `p^0 = sqrt(m^2 + |p|^2)`.
pub fn on_shell(p: Vector3<f64>, mass: f64) -> FourVector {
    FourVector::new((mass * mass + p.norm_squared()).sqrt(), p)
}

fn check_on_shell(p: &FourVector, mass: f64) -> Result<()> {
    if !(mass > 0.0) {
        return Err(Error::Domain(format!("mass must be positive, got {mass}")));
    }
    if !(p.t > 0.0) {
        return Err(Error::Domain(format!("energy must be positive, got {}", p.t)));
    }
    let defect = (p.square() - mass * mass).abs();
    if defect > ON_SHELL_TOL * p.t * p.t {
        return Err(Error::OffShell { defect });
    }
    Ok(())
}

/// `u = sqrt((E+m)/2m) (chi, sigma.p chi/(E+m))`, normalised to `ubar u = 1`.
pub fn plane_wave_spinor(p: &FourVector, spin: Spin, mass: f64) -> Result<Spinor4> {
    check_on_shell(p, mass)?;
    let e = p.t;
    let [a, b] = spin.chi();
    let (px, py, pz) = (p.x[0], p.x[1], p.x[2]);
    // sigma.p = [[pz, px - i py], [px + i py, -pz]]
    let lower0 = c(pz, 0.0) * a + c(px, -py) * b;
    let lower1 = c(px, py) * a - c(pz, 0.0) * b;
    let k = 1.0 / (e + mass);
    let n = ((e + mass) / (2.0 * mass)).sqrt();
    Ok(Spinor4::new(a * n, b * n, lower0 * (k * n), lower1 * (k * n)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlaneWave {
    pub amplitude: [f64; 2],
    pub momentum: [f64; 4],
    pub spin: Spin,
}

#[derive(Debug, Clone, PartialEq)]
struct Component {
    amplitude: Complex64,
    momentum: FourVector,
    spin: Spin,
    spinor: Spinor4,
}

/// Superposition of positive-energy plane waves of one mass.
#[derive(Debug, Clone, PartialEq)]
pub struct DiracPlaneWaveState {
    mass: f64,
    algebra: GammaAlgebra,
    waves: Vec<Component>,
}

impl DiracPlaneWaveState {
    pub fn new(mass: f64, waves: &[(Complex64, FourVector, Spin)]) -> Result<Self> {
        let algebra = GammaAlgebra::dirac();
        let waves = waves
            .iter()
            .map(|&(amplitude, momentum, spin)| {
                Ok(Component {
                    amplitude,
                    momentum,
                    spin,
                    spinor: plane_wave_spinor(&momentum, spin, mass)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(DiracPlaneWaveState { mass, algebra, waves })
    }

    /// `waves` components with random direction, speed below `max_speed`,
    /// amplitude in the unit square and random spin label.
    pub fn random(rng: &mut impl Rng, waves: usize, mass: f64, max_speed: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&max_speed) {
            return Err(Error::Config(format!("max speed must lie in [0, 1), got {max_speed}")));
        }
        let list: Vec<_> = (0..waves)
            .map(|_| {
                let amp = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                let speed = rng.gen_range(0.0..=max_speed);
                let p = random_momentum(rng, mass, speed);
                let spin = if rng.gen_bool(0.5) { Spin::Up } else { Spin::Down };
                (amp, p, spin)
            })
            .collect();
        DiracPlaneWaveState::new(mass, &list)
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn len(&self) -> usize {
        self.waves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.waves.is_empty()
    }

    pub fn descriptors(&self) -> Vec<PlaneWave> {
        self.waves
            .iter()
            .map(|w| PlaneWave {
                amplitude: [w.amplitude.re, w.amplitude.im],
                momentum: w.momentum.as_array(),
                spin: w.spin,
            })
            .collect()
    }

    pub fn psi(&self, x: &FourVector) -> Spinor4 {
        self.waves.iter().fold(Spinor4::zeros(), |acc, w| {
            acc + w.spinor * (w.amplitude * Complex64::from_polar(1.0, -w.momentum.dot(x)))
        })
    }

    /// `sum_{k,l} c_k^* c_l exp(i(p_k - p_l).x) f(k, l)`, real part.
    fn pair_sum(&self, x: &FourVector, f: impl Fn(&Component, &Component) -> [Complex64; 4]) -> FourVector {
        let mut acc = [c(0.0, 0.0); 4];
        for k in &self.waves {
            for l in &self.waves {
                let w = k.amplitude.conj() * l.amplitude * Complex64::from_polar(1.0, (k.momentum - l.momentum).dot(x));
                let v = f(k, l);
                for mu in 0..4 {
                    acc[mu] += w * v[mu];
                }
            }
        }
        FourVector::new(acc[0].re, Vector3::new(acc[1].re, acc[2].re, acc[3].re))
    }
}

/// Spatial momentum of the given speed along a uniformly random direction.
pub fn random_momentum(rng: &mut impl Rng, mass: f64, speed: f64) -> FourVector {
    let z: f64 = rng.gen_range(-1.0..=1.0);
    let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let s = (1.0 - z * z).sqrt();
    let dir = Vector3::new(s * phi.cos(), s * phi.sin(), z);
    let gamma = 1.0 / (1.0 - speed * speed).sqrt();
    on_shell(dir * (mass * gamma * speed), mass)
}

/// `j^mu = psibar gamma^mu psi`.
pub fn dirac_current(state: &DiracPlaneWaveState, x: &FourVector) -> FourVector {
    let g = &state.algebra;
    let psi = state.psi(x);
    let j: Vec<f64> = (0..4).map(|mu| g.bilinear(&psi, g.gamma(mu), &psi).re).collect();
    FourVector::new(j[0], Vector3::new(j[1], j[2], j[3]))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GordonTerms {
    /// `(1/2m)[psibar p^ psi - (p^ psibar) psi]`
    pub convective: FourVector,
    /// `-(i/m) p^_nu (psibar S^{mu nu} psi)`
    pub spin_term: FourVector,
}

impl GordonTerms {
    pub fn sum(&self) -> FourVector {
        self.convective + self.spin_term
    }
}

pub fn gordon_decompose(state: &DiracPlaneWaveState, x: &FourVector) -> GordonTerms {
    let g = &state.algebra;
    let m = state.mass;
    let identity = Gamma::identity();
    let s: Vec<Vec<Gamma>> = (0..4)
        .map(|mu| (0..4).map(|nu| g.spin_tensor(mu, nu)).collect())
        .collect();
    let convective = state.pair_sum(x, |k, l| {
        let overlap = g.bilinear(&k.spinor, &identity, &l.spinor);
        let p = (k.momentum + l.momentum).as_array();
        [0, 1, 2, 3].map(|mu| overlap * (p[mu] / (2.0 * m)))
    });
    let spin_term = state.pair_sum(x, |k, l| {
        let q = (k.momentum - l.momentum).as_array();
        [0, 1, 2, 3].map(|mu| {
            (0..4).fold(c(0.0, 0.0), |acc, nu| {
                if q[nu] == 0.0 {
                    return acc;
                }
                acc + g.bilinear(&k.spinor, &s[mu][nu], &l.spinor) * c(0.0, METRIC[nu] * q[nu] / m)
            })
        })
    });
    GordonTerms { convective, spin_term }
}

/// Max componentwise `|j - (convective + spin)|`.
pub fn gordon_residual(state: &DiracPlaneWaveState, x: &FourVector) -> f64 {
    let j = dirac_current(state, x);
    let d = j - gordon_decompose(state, x).sum();
    d.as_array().iter().map(|v| v.abs()).fold(0.0, f64::max)
}

/// `|d_mu j^mu|` from the closed-form x-dependence of every cross term.
pub fn current_divergence(state: &DiracPlaneWaveState, x: &FourVector) -> f64 {
    let g = &state.algebra;
    let mut acc = c(0.0, 0.0);
    for k in &state.waves {
        for l in &state.waves {
            let q = (k.momentum - l.momentum).as_array();
            let w = k.amplitude.conj() * l.amplitude * Complex64::from_polar(1.0, (k.momentum - l.momentum).dot(x));
            for mu in 0..4 {
                // d_mu exp(i q.x) = i q_mu exp(i q.x)
                acc += w * g.bilinear(&k.spinor, g.gamma(mu), &l.spinor) * c(0.0, METRIC[mu] * q[mu]);
            }
        }
    }
    acc.norm()
}

/// `p_mu ubar gamma^mu u` for a single unit-amplitude wave; equals `m`.
pub fn footnote_identity_check(p: &FourVector, spin: Spin, mass: f64) -> Result<f64> {
    let state = DiracPlaneWaveState::new(mass, &[(c(1.0, 0.0), *p, spin)])?;
    Ok(p.dot(&dirac_current(&state, &FourVector::new(0.0, Vector3::zeros()))))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeAverageReport {
    pub beat_period: f64,
    pub averaged: FourVector,
    /// `sum_k |c_k|^2 p_k / m`.
    pub incoherent: FourVector,
    pub defect: f64,
}

/// Averages the two-wave current at fixed position over one beat period
/// `2 pi / |E_1 - E_2|` with `samples` equally spaced times.
pub fn time_average_check(
    state: &DiracPlaneWaveState,
    position: Vector3<f64>,
    samples: usize,
) -> Result<TimeAverageReport> {
    if state.len() != 2 {
        return Err(Error::Config(format!(
            "time average needs exactly two waves, got {}",
            state.len()
        )));
    }
    if samples < 3 {
        return Err(Error::Config("time average needs at least three samples".into()));
    }
    let de = (state.waves[0].momentum.t - state.waves[1].momentum.t).abs();
    if !(de > 0.0) {
        return Err(Error::Domain("equal energies: the beat period is unbounded".into()));
    }
    let period = std::f64::consts::TAU / de;
    let mut sum = [0.0; 4];
    for n in 0..samples {
        let t = period * n as f64 / samples as f64;
        let j = dirac_current(state, &FourVector::new(t, position)).as_array();
        for mu in 0..4 {
            sum[mu] += j[mu];
        }
    }
    let averaged = FourVector::new(sum[0], Vector3::new(sum[1], sum[2], sum[3])) * (1.0 / samples as f64);
    let incoherent = state
        .waves
        .iter()
        .fold(FourVector::new(0.0, Vector3::zeros()), |acc, w| {
            acc + w.momentum * (w.amplitude.norm_sqr() / state.mass)
        });
    let defect = (averaged - incoherent)
        .as_array()
        .iter()
        .map(|v| v.abs())
        .fold(0.0, f64::max);
    Ok(TimeAverageReport {
        beat_period: period,
        averaged,
        incoherent,
        defect,
    })
}
