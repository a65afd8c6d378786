//! Relativistic kinematics of a point charge circling its centre of mass.
//!
//! Natural units (c = 1), signature (+,-,-,-). The charge moves on a circle
//! of radius `r(tau)` in the centre-of-mass frame (CMF) while the CM drifts
//! with constant velocity `w`. The circle lies in a plane orthogonal to `w`,
//! so lab time and CM proper time are related by `t = gamma_w tau` exactly.
//!
//! Two four-velocities are compared: the standard one built from the charge
//! speed `|v|`, and the one built from the CM Lorentz factor
//! `sqrt(1 - w^2)`. Only the latter exists for light-like and space-like
//! internal motion.

use std::io::Write;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::Vector3;
use serde::Serialize;

use crate::{Error, Result};

/// Width of the band around `v^2 = 0` classified as light-like.
pub const LIGHT_LIKE_BAND: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FourVector {
    pub t: f64,
    pub x: Vector3<f64>,
}

impl FourVector {
    pub fn new(t: f64, x: Vector3<f64>) -> Self {
        FourVector { t, x }
    }

    pub fn dot(&self, other: &FourVector) -> f64 {
        self.t * other.t - self.x.dot(&other.x)
    }

    pub fn square(&self) -> f64 {
        self.dot(self)
    }

    /// Components in the frame moving with `velocity` relative to this one.
    pub fn boost(&self, velocity: Vector3<f64>) -> Result<FourVector> {
        let b2 = velocity.norm_squared();
        if b2 >= 1.0 {
            return Err(Error::SuperluminalDrift { speed: b2.sqrt() });
        }
        if b2 == 0.0 {
            return Ok(*self);
        }
        let gamma = 1.0 / (1.0 - b2).sqrt();
        let n = velocity / b2.sqrt();
        let xpar = self.x.dot(&n);
        Ok(FourVector {
            t: gamma * (self.t - velocity.dot(&self.x)),
            x: self.x + n * ((gamma - 1.0) * xpar) - velocity * (gamma * self.t),
        })
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.t, self.x[0], self.x[1], self.x[2]]
    }
}

impl Add for FourVector {
    type Output = FourVector;
    fn add(self, o: FourVector) -> FourVector {
        FourVector::new(self.t + o.t, self.x + o.x)
    }
}

impl Sub for FourVector {
    type Output = FourVector;
    fn sub(self, o: FourVector) -> FourVector {
        FourVector::new(self.t - o.t, self.x - o.x)
    }
}

impl Mul<f64> for FourVector {
    type Output = FourVector;
    fn mul(self, s: f64) -> FourVector {
        FourVector::new(self.t * s, self.x * s)
    }
}

impl Neg for FourVector {
    type Output = FourVector;
    fn neg(self) -> FourVector {
        FourVector::new(-self.t, -self.x)
    }
}

/// `r(tau) = R (1 + amplitude sin(rate tau))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadiusModulation {
    pub amplitude: f64,
    pub rate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HelicalTrajectory {
    mass: f64,
    radius: f64,
    omega: f64,
    drift: Vector3<f64>,
    phase: f64,
    plane: [Vector3<f64>; 2],
    modulation: Option<RadiusModulation>,
}

/// Position and its first three CM proper-time derivatives in the CMF.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InternalMotion {
    pub position: Vector3<f64>,
    pub velocity: Vector3<f64>,
    pub acceleration: Vector3<f64>,
    pub jerk: Vector3<f64>,
}

impl HelicalTrajectory {
    /// The circle plane is chosen orthogonal to `drift` (the xy plane when at rest).
    pub fn new(mass: f64, radius: f64, omega: f64, drift: Vector3<f64>, phase: f64) -> Result<Self> {
        let plane = default_plane(&drift);
        HelicalTrajectory::with_plane(mass, radius, omega, drift, phase, plane)
    }

    pub fn with_plane(
        mass: f64,
        radius: f64,
        omega: f64,
        drift: Vector3<f64>,
        phase: f64,
        plane: [Vector3<f64>; 2],
    ) -> Result<Self> {
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::Config(format!("mass must be positive, got {mass}")));
        }
        if !(radius >= 0.0 && radius.is_finite()) {
            return Err(Error::Config(format!("radius must be non-negative, got {radius}")));
        }
        if !omega.is_finite() || !phase.is_finite() || drift.iter().any(|c| !c.is_finite()) {
            return Err(Error::Config("trajectory parameters must be finite".into()));
        }
        let speed = drift.norm();
        if speed >= 1.0 {
            return Err(Error::SuperluminalDrift { speed });
        }
        let [e1, e2] = plane;
        let tol = 1e-12;
        if (e1.norm() - 1.0).abs() > tol || (e2.norm() - 1.0).abs() > tol || e1.dot(&e2).abs() > tol {
            return Err(Error::Config("zbw plane must be an orthonormal pair".into()));
        }
        if e1.dot(&drift).abs() > tol || e2.dot(&drift).abs() > tol {
            return Err(Error::Config(
                "zbw plane must be orthogonal to the drift velocity".into(),
            ));
        }
        Ok(HelicalTrajectory {
            mass,
            radius,
            omega,
            drift,
            phase,
            plane,
            modulation: None,
        })
    }

    /// `Omega = 2m/hbar`, `R = hbar/2m`: internal speed exactly 1.
    pub fn light_like(mass: f64, hbar: f64, drift: Vector3<f64>, phase: f64) -> Result<Self> {
        if !(hbar > 0.0) {
            return Err(Error::Config(format!("hbar must be positive, got {hbar}")));
        }
        HelicalTrajectory::new(mass, hbar / (2.0 * mass), 2.0 * mass / hbar, drift, phase)
    }

    pub fn with_modulation(mut self, amplitude: f64, rate: f64) -> Result<Self> {
        if !(amplitude.abs() < 1.0 && rate.is_finite()) {
            return Err(Error::Config(format!(
                "modulation amplitude must lie in (-1, 1), got {amplitude}"
            )));
        }
        self.modulation = Some(RadiusModulation { amplitude, rate });
        Ok(self)
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn drift(&self) -> Vector3<f64> {
        self.drift
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn plane(&self) -> [Vector3<f64>; 2] {
        self.plane
    }

    pub fn modulation(&self) -> Option<RadiusModulation> {
        self.modulation
    }

    /// `1/sqrt(1 - w^2)`.
    pub fn drift_gamma(&self) -> f64 {
        1.0 / (1.0 - self.drift.norm_squared()).sqrt()
    }

    pub fn proper_time(&self, t: f64) -> f64 {
        t / self.drift_gamma()
    }

    /// `r, r', r'', r'''` in CM proper time.
    fn radius_derivatives(&self, tau: f64) -> [f64; 4] {
        let r0 = self.radius;
        match self.modulation {
            None => [r0, 0.0, 0.0, 0.0],
            Some(RadiusModulation { amplitude: a, rate: e }) => {
                let (s, c) = (e * tau).sin_cos();
                [
                    r0 * (1.0 + a * s),
                    r0 * a * e * c,
                    -r0 * a * e * e * s,
                    -r0 * a * e * e * e * c,
                ]
            }
        }
    }

    /// Analytic CMF motion at CM proper time `tau`.
    pub fn internal(&self, tau: f64) -> InternalMotion {
        let [r, r1, r2, r3] = self.radius_derivatives(tau);
        let w = self.omega;
        let (s, c) = (w * tau + self.phase).sin_cos();
        let [e1, e2] = self.plane;
        let u = e1 * c + e2 * s;
        let u_perp = e2 * c - e1 * s;
        InternalMotion {
            position: u * r,
            velocity: u * r1 + u_perp * (r * w),
            acceleration: u * (r2 - r * w * w) + u_perp * (2.0 * r1 * w),
            jerk: u * (r3 - 3.0 * r1 * w * w) + u_perp * (3.0 * r2 * w - r * w * w * w),
        }
    }

    /// `x^mu(t) = (t, w t + X(tau))`.
    pub fn position(&self, t: f64) -> FourVector {
        FourVector::new(t, self.drift * t + self.internal(self.proper_time(t)).position)
    }

    /// `dx/dt = w + V(tau)/gamma_w`.
    pub fn lab_velocity(&self, t: f64) -> Vector3<f64> {
        self.drift + self.internal(self.proper_time(t)).velocity / self.drift_gamma()
    }

    /// `w^mu = (1; w)/sqrt(1 - w^2)`.
    pub fn drift_four_velocity(&self) -> FourVector {
        let g = self.drift_gamma();
        FourVector::new(g, self.drift * g)
    }
}

fn default_plane(drift: &Vector3<f64>) -> [Vector3<f64>; 2] {
    if drift.norm() == 0.0 {
        return [Vector3::x(), Vector3::y()];
    }
    let n = drift.normalize();
    let helper = if n.z.abs() < 0.9 { Vector3::z() } else { Vector3::x() };
    let e1 = helper.cross(&n).normalize();
    let e2 = n.cross(&e1);
    [e1, e2]
}

/// CM proper time along a sampled drift history.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProperTimeMap {
    pub t: Vec<f64>,
    pub tau: Vec<f64>,
}

/// `tau(t) = int sqrt(1 - w^2) dt` on uniformly spaced samples, fourth order
/// (centred 4-point rule inside, Adams-Moulton weights on the end intervals).
pub fn cm_proper_time(times: &[f64], w_history: &[Vector3<f64>]) -> Result<ProperTimeMap> {
    let n = times.len();
    if n != w_history.len() {
        return Err(Error::Shape(format!("{n} times but {} velocities", w_history.len())));
    }
    if n < 4 {
        return Err(Error::Config("proper-time quadrature needs at least 4 samples".into()));
    }
    let h = (times[n - 1] - times[0]) / (n - 1) as f64;
    if !(h > 0.0) {
        return Err(Error::Config("sample times must increase".into()));
    }
    for (k, t) in times.iter().enumerate() {
        if (t - (times[0] + k as f64 * h)).abs() > 1e-9 * h.max(t.abs()) {
            return Err(Error::Config("sample times must be uniformly spaced".into()));
        }
    }
    let mut f = Vec::with_capacity(n);
    for w in w_history {
        let speed = w.norm();
        if !(speed < 1.0) {
            return Err(Error::SuperluminalDrift { speed });
        }
        f.push((1.0 - w.norm_squared()).sqrt());
    }
    let mut tau = vec![0.0; n];
    for i in 0..n - 1 {
        let area = if i == 0 {
            h / 24.0 * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3])
        } else if i == n - 2 {
            h / 24.0 * (f[n - 4] - 5.0 * f[n - 3] + 19.0 * f[n - 2] + 9.0 * f[n - 1])
        } else {
            h / 24.0 * (-f[i - 1] + 13.0 * f[i] + 13.0 * f[i + 1] - f[i + 2])
        };
        if !(area > 0.0) {
            return Err(Error::Domain(format!("proper time fails to increase on interval {i}")));
        }
        tau[i + 1] = tau[i] + area;
    }
    Ok(ProperTimeMap { t: times.to_vec(), tau })
}

/// `(1; v)/sqrt(1 - w^2) = (gamma_w; gamma_w w + V)`.
pub fn four_velocity_new(traj: &HelicalTrajectory, t: f64) -> FourVector {
    let g = traj.drift_gamma();
    FourVector::new(g, traj.lab_velocity(t) * g)
}

/// `1 - v^2` for the charge, factored as `(1 - w^2)(1 - V^2_CMF)` since the
/// internal motion is orthogonal to the drift.
pub fn one_minus_v2(traj: &HelicalTrajectory, t: f64) -> f64 {
    let big_v2 = traj.internal(traj.proper_time(t)).velocity.norm_squared();
    (1.0 - traj.drift().norm_squared()) * (1.0 - big_v2)
}

/// `(1; v)/sqrt(1 - v^2)`; undefined once the charge speed is within the
/// light-like band of 1.
pub fn four_velocity_std(traj: &HelicalTrajectory, t: f64) -> Result<FourVector> {
    let v = traj.lab_velocity(t);
    let gap = one_minus_v2(traj, t);
    if !(gap > LIGHT_LIKE_BAND) {
        return Err(Error::StandardVelocityUndefined { speed: v.norm() });
    }
    let g = 1.0 / gap.sqrt();
    Ok(FourVector::new(g, v * g))
}

/// `p^mu = m w^mu`, constant for a free particle.
pub fn impulse(traj: &HelicalTrajectory) -> FourVector {
    traj.drift_four_velocity() * traj.mass()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MassConstraintReport {
    /// `(p^0 - p.v)/sqrt(1 - w^2)` with the 3-velocity `v = dx/dt`.
    pub m1: f64,
    /// `p^0_CMF / sqrt(1 - V^2_CMF)`, only for sub-luminal internal motion.
    pub m2: Option<f64>,
    pub p_dot_v_new: f64,
    pub p_dot_v_std: Option<f64>,
    /// `m sqrt(1 - w^2)/sqrt(1 - v^2)`.
    pub p_dot_v_std_predicted: Option<f64>,
    /// `|w.v - w^2|`.
    pub projection_defect: f64,
}

pub fn mass_constraint_check(traj: &HelicalTrajectory, t: f64) -> MassConstraintReport {
    let m = traj.mass();
    let p = impulse(traj);
    let w = traj.drift();
    let v = traj.lab_velocity(t);
    let g = traj.drift_gamma();
    let v_cmf2 = traj.internal(traj.proper_time(t)).velocity.norm_squared();
    let std = four_velocity_std(traj, t).ok();
    MassConstraintReport {
        m1: (p.t - p.x.dot(&v)) * g,
        m2: (v_cmf2 < 1.0).then(|| m / (1.0 - v_cmf2).sqrt()),
        p_dot_v_new: p.dot(&four_velocity_new(traj, t)),
        p_dot_v_std: std.map(|s| p.dot(&s)),
        p_dot_v_std_predicted: std.map(|_| m * (1.0 - w.norm_squared()).sqrt() / one_minus_v2(traj, t).sqrt()),
        projection_defect: (w.dot(&v) - w.norm_squared()).abs(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Causality {
    TimeLike,
    LightLike,
    SpaceLike,
}

impl Causality {
    pub fn of(v2: f64) -> Causality {
        if v2 > LIGHT_LIKE_BAND {
            Causality::TimeLike
        } else if v2 < -LIGHT_LIKE_BAND {
            Causality::SpaceLike
        } else {
            Causality::LightLike
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Causality::TimeLike => "time-like",
            Causality::LightLike => "light-like",
            Causality::SpaceLike => "space-like",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct V2Classification {
    pub v2_lab: f64,
    /// `v^2` after boosting `v^mu` into the CMF.
    pub v2_cmf: f64,
    /// `1 - V^2_CMF` from the analytic internal velocity.
    pub v2_expected: f64,
    pub invariance_defect: f64,
    pub class: Causality,
}

pub fn classify_v2(traj: &HelicalTrajectory, t: f64) -> Result<V2Classification> {
    let v = four_velocity_new(traj, t);
    let v_cmf = v.boost(traj.drift())?;
    let v2_lab = v.square();
    let v2_cmf = v_cmf.square();
    Ok(V2Classification {
        v2_lab,
        v2_cmf,
        v2_expected: 1.0 - traj.internal(traj.proper_time(t)).velocity.norm_squared(),
        invariance_defect: (v2_lab - v2_cmf).abs(),
        class: Causality::of(v2_lab),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BarutZanghiReport {
    pub v2: f64,
    /// `v'' . v` with derivatives in CM proper time.
    pub vddot_dot_v: f64,
    /// `1 - hbar^2 v''.v / 4m^2`.
    pub predicted_v2: f64,
    pub defect: f64,
    /// `Omega - 2m/hbar`; the relation is only expected when this vanishes.
    pub frequency_offset: f64,
}

pub fn barut_zanghi_check(traj: &HelicalTrajectory, t: f64, hbar: f64) -> BarutZanghiReport {
    let m = traj.mass();
    let v = four_velocity_new(traj, t);
    let jerk = traj.internal(traj.proper_time(t)).jerk;
    let vddot = FourVector::new(0.0, jerk);
    let vv = vddot.dot(&v);
    let v2 = v.square();
    let predicted = 1.0 - hbar * hbar * vv / (4.0 * m * m);
    BarutZanghiReport {
        v2,
        vddot_dot_v: vv,
        predicted_v2: predicted,
        defect: (v2 - predicted).abs(),
        frequency_offset: traj.omega() - 2.0 * m / hbar,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct V2Series {
    pub t: Vec<f64>,
    pub tau: Vec<f64>,
    pub v2: Vec<f64>,
    /// `1 - r'^2 - (r Omega)^2` from the analytic radius profile.
    pub v2_analytic: Vec<f64>,
    pub max_analytic_defect: f64,
    /// `max v^2 - min v^2`.
    pub spread: f64,
}

pub fn v2_time_dependence(traj: &HelicalTrajectory, t0: f64, t1: f64, samples: usize) -> Result<V2Series> {
    if samples < 2 || !(t1 > t0) {
        return Err(Error::Config("need at least two samples on an increasing range".into()));
    }
    let mut out = V2Series {
        t: Vec::with_capacity(samples),
        tau: Vec::with_capacity(samples),
        v2: Vec::with_capacity(samples),
        v2_analytic: Vec::with_capacity(samples),
        max_analytic_defect: 0.0,
        spread: 0.0,
    };
    for k in 0..samples {
        let t = t0 + (t1 - t0) * k as f64 / (samples - 1) as f64;
        let tau = traj.proper_time(t);
        let [r, r1, _, _] = traj.radius_derivatives(tau);
        let v2 = four_velocity_new(traj, t).square();
        let analytic = 1.0 - r1 * r1 - (r * traj.omega()).powi(2);
        out.max_analytic_defect = out.max_analytic_defect.max((v2 - analytic).abs());
        out.t.push(t);
        out.tau.push(tau);
        out.v2.push(v2);
        out.v2_analytic.push(analytic);
    }
    let lo = out.v2.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = out.v2.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    out.spread = hi - lo;
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KinematicSample {
    pub t: f64,
    pub tau: f64,
    pub x: FourVector,
    pub v_new: FourVector,
    pub v_std: Option<FourVector>,
    pub w: FourVector,
    pub p: FourVector,
    pub v2: f64,
    pub class: Causality,
    pub m1: f64,
    pub m2: Option<f64>,
    pub p_dot_v_new: f64,
    pub p_dot_v_std: Option<f64>,
}

pub fn sample(traj: &HelicalTrajectory, t: f64) -> KinematicSample {
    let v_new = four_velocity_new(traj, t);
    let mc = mass_constraint_check(traj, t);
    KinematicSample {
        t,
        tau: traj.proper_time(t),
        x: traj.position(t),
        v_new,
        v_std: four_velocity_std(traj, t).ok(),
        w: traj.drift_four_velocity(),
        p: impulse(traj),
        v2: v_new.square(),
        class: Causality::of(v_new.square()),
        m1: mc.m1,
        m2: mc.m2,
        p_dot_v_new: mc.p_dot_v_new,
        p_dot_v_std: mc.p_dot_v_std,
    }
}

pub fn sample_series(traj: &HelicalTrajectory, times: &[f64]) -> Vec<KinematicSample> {
    times.iter().map(|&t| sample(traj, t)).collect()
}

/// One row per sample; undefined standard quantities are left empty.
pub fn write_series_csv(samples: &[KinematicSample], mut w: impl Write) -> Result<()> {
    writeln!(
        w,
        "t,tau,x0,x1,x2,x3,v2_new,v2_std,p_dot_v_new,p_dot_v_std,classification"
    )?;
    let opt = |v: Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_default();
    for s in samples {
        let [x0, x1, x2, x3] = s.x.as_array();
        writeln!(
            w,
            "{:e},{:e},{x0:e},{x1:e},{x2:e},{x3:e},{:e},{},{:e},{},{}",
            s.t,
            s.tau,
            s.v2,
            opt(s.v_std.map(|v| v.square())),
            s.p_dot_v_new,
            opt(s.p_dot_v_std),
            s.class.as_str()
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn helix(radius: f64, omega: f64, w: [f64; 3]) -> HelicalTrajectory {
        HelicalTrajectory::new(1.0, radius, omega, Vector3::from(w), 0.3).unwrap()
    }

    #[test]
    fn minkowski_dot_and_boost() {
        let a = FourVector::new(2.0, Vector3::new(1.0, 0.5, -0.2));
        let b = FourVector::new(1.5, Vector3::new(0.3, -0.1, 0.7));
        assert!((a.dot(&b) - (3.0 - 0.3 + 0.05 + 0.14)).abs() < 1e-15);
        let beta = Vector3::new(0.3, -0.4, 0.5);
        let (ab, bb) = (a.boost(beta).unwrap(), b.boost(beta).unwrap());
        assert!((ab.dot(&bb) - a.dot(&b)).abs() < 1e-13);
        let back = ab.boost(-beta).unwrap();
        assert!((back - a).as_array().iter().all(|c| c.abs() < 1e-13));
        assert!(a.boost(Vector3::new(1.0, 0.0, 0.0)).is_err());
        // rest four-velocity seen from a moving frame
        let u = FourVector::new(1.0, Vector3::zeros())
            .boost(Vector3::new(0.6, 0.0, 0.0))
            .unwrap();
        assert!((u.t - 1.25).abs() < 1e-15 && (u.x[0] + 0.75).abs() < 1e-15);
    }

    #[test]
    fn trajectory_validation() {
        assert!(matches!(
            HelicalTrajectory::new(1.0, 1.0, 1.0, Vector3::new(1.0, 0.0, 0.0), 0.0),
            Err(Error::SuperluminalDrift { .. })
        ));
        assert!(HelicalTrajectory::new(0.0, 1.0, 1.0, Vector3::zeros(), 0.0).is_err());
        assert!(HelicalTrajectory::new(1.0, -1.0, 1.0, Vector3::zeros(), 0.0).is_err());
        let bad_plane = [Vector3::x(), Vector3::y()];
        assert!(HelicalTrajectory::with_plane(1.0, 1.0, 1.0, Vector3::new(0.5, 0.0, 0.0), 0.0, bad_plane).is_err());
        let tr = helix(1.0, 1.0, [0.2, 0.3, 0.4]);
        let [e1, e2] = tr.plane();
        assert!(e1.dot(&tr.drift()).abs() < 1e-15 && e2.dot(&tr.drift()).abs() < 1e-15);
        assert!(tr.with_modulation(1.0, 1.0).is_err());
    }

    #[test]
    fn proper_time_constant_drift() {
        let times: Vec<f64> = (0..101).map(|k| k as f64 * 0.05).collect();
        let rest = cm_proper_time(&times, &vec![Vector3::zeros(); 101]).unwrap();
        for (t, tau) in rest.t.iter().zip(&rest.tau) {
            assert!((t - tau).abs() < 1e-13);
        }
        let moving = cm_proper_time(&times, &vec![Vector3::new(0.6, 0.0, 0.0); 101]).unwrap();
        for (t, tau) in moving.t.iter().zip(&moving.tau) {
            assert!((0.8 * t - tau).abs() < 1e-12);
        }
        assert!(matches!(
            cm_proper_time(&times[..4], &[Vector3::x(); 4]),
            Err(Error::SuperluminalDrift { .. })
        ));
        assert!(cm_proper_time(&times[..3], &[Vector3::zeros(); 3]).is_err());
    }

    #[test]
    fn proper_time_refinement() {
        let w = |t: f64| Vector3::new(0.5 * t.sin(), 0.0, 0.0);
        let run = |n: usize| {
            let times: Vec<f64> = (0..n).map(|k| 10.0 * k as f64 / (n - 1) as f64).collect();
            let ws: Vec<_> = times.iter().map(|&t| w(t)).collect();
            cm_proper_time(&times, &ws).unwrap()
        };
        let fine = run(1001);
        let max_err = |n: usize| {
            let m = run(n);
            let stride = 1000 / (n - 1);
            m.tau
                .iter()
                .enumerate()
                .map(|(k, tau)| (tau - fine.tau[stride * k]).abs())
                .fold(0.0, f64::max)
        };
        assert!(run(101).tau.windows(2).all(|p| p[1] > p[0]));
        let (e_coarse, e_mid) = (max_err(101), max_err(201));
        assert!(e_coarse < 5e-6, "{e_coarse}");
        assert!(e_coarse / e_mid > 12.0, "{e_coarse} {e_mid}");
    }

    #[test]
    fn light_like_rest_frame() {
        let tr = HelicalTrajectory::light_like(1.0, 1.0, Vector3::zeros(), 0.0).unwrap();
        for t in [0.0, 0.4, 2.7] {
            let v = four_velocity_new(&tr, t);
            assert_eq!(v.t, 1.0);
            assert!((v.x.norm() - 1.0).abs() < 1e-15);
            assert!(v.square().abs() < 1e-15);
            assert!(matches!(
                four_velocity_std(&tr, t),
                Err(Error::StandardVelocityUndefined { .. })
            ));
        }
    }

    #[test]
    fn scalar_limit() {
        let tr = helix(0.0, 1.3, [0.0; 3]);
        let v = four_velocity_new(&tr, 1.1);
        assert_eq!(v, FourVector::new(1.0, Vector3::zeros()));
        assert_eq!(v.square(), 1.0);
        let moving = helix(0.0, 1.3, [0.2, -0.1, 0.4]);
        let (a, b) = (
            four_velocity_new(&moving, 0.7),
            four_velocity_std(&moving, 0.7).unwrap(),
        );
        assert!((a - b).as_array().iter().all(|c| c.abs() < 1e-15));
        let mc = mass_constraint_check(&moving, 0.7);
        assert!((mc.m1 - 1.0).abs() < 1e-15);
        assert!((mc.m2.unwrap() - 1.0).abs() < 1e-15);
        let s = v2_time_dependence(&moving, 0.0, 5.0, 11).unwrap();
        assert!(s.v2.iter().all(|v| (v - 1.0).abs() < 1e-15));
    }

    fn fd5(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
        (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
    }

    #[test]
    fn boosted_helix_matches_finite_difference() {
        let tr = helix(0.9 / 1.3, 1.3, [0.5, 0.0, 0.0]);
        let times: Vec<f64> = (0..41).map(|k| k as f64 * 0.1).collect();
        let map = cm_proper_time(&times, &vec![tr.drift(); times.len()]).unwrap();
        // tau is linear in t here, so dtau/dt comes from the tabulated map
        let dtau_dt = (map.tau[40] - map.tau[0]) / (map.t[40] - map.t[0]);
        let h = 1e-3;
        for t in [0.3, 1.7, 3.2] {
            let v = four_velocity_new(&tr, t);
            let dt = 1.0 / dtau_dt;
            assert!((v.t - dt).abs() < 1e-8);
            for a in 0..3 {
                let d = fd5(|s| tr.position(s).x[a], t, h) / dtau_dt;
                assert!((v.x[a] - d).abs() < 1e-8, "{a}: {} vs {d}", v.x[a]);
            }
        }
    }

    #[test]
    fn standard_velocity_square_is_one() {
        let tr = helix(0.8, 1.0, [0.0; 3]);
        for t in [0.0, 1.0, 2.5] {
            let v = four_velocity_std(&tr, t).unwrap();
            assert!((v.square() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn impulse_values_and_invariance() {
        assert_eq!(
            impulse(&helix(0.5, 1.0, [0.0; 3])),
            FourVector::new(1.0, Vector3::zeros())
        );
        let p = impulse(&helix(0.5, 1.0, [0.6, 0.0, 0.0]));
        assert!((p.t - 1.25).abs() < 1e-15 && (p.x[0] - 0.75).abs() < 1e-15);
        let base = impulse(&helix(0.1, 0.2, [0.3, 0.1, -0.2]));
        for (r, om, ph) in [(0.7, 3.0, 1.0), (2.0, 0.4, -2.0), (0.0, 9.0, 0.1)] {
            let tr = HelicalTrajectory::new(1.0, r, om, Vector3::new(0.3, 0.1, -0.2), ph).unwrap();
            assert_eq!(impulse(&tr), base);
        }
    }

    #[test]
    fn mass_constraint_all_regimes() {
        for w in [[0.0; 3], [0.3, 0.0, 0.0], [0.1, 0.5, 0.7]] {
            for om_r in [0.5, 1.0, 1.2] {
                for t in [0.0, 0.37, 4.1] {
                    let tr = HelicalTrajectory::new(2.0, om_r / 1.7, 1.7, Vector3::from(w), 0.9).unwrap();
                    let mc = mass_constraint_check(&tr, t);
                    assert!((mc.p_dot_v_new - 2.0).abs() < 1e-12);
                    assert!((mc.m1 - 2.0).abs() < 1e-12);
                    assert!(mc.projection_defect < 1e-12);
                    if let (Some(a), Some(b)) = (mc.p_dot_v_std, mc.p_dot_v_std_predicted) {
                        assert!((a - b).abs() < 1e-12, "{w:?} {om_r} {t}: {a} {b}");
                    }
                }
            }
        }
    }

    #[test]
    fn classification_examples() {
        let cases = [
            (0.5, 0.75, Causality::TimeLike),
            (1.0, 0.0, Causality::LightLike),
            (1.2, -0.44, Causality::SpaceLike),
        ];
        for (om_r, v2, class) in cases {
            let c = classify_v2(&helix(om_r, 1.0, [0.0; 3]), 0.8).unwrap();
            assert!((c.v2_lab - v2).abs() < 1e-12);
            assert_eq!(c.class, class);
            let b = classify_v2(&helix(om_r, 1.0, [0.5, -0.3, 0.6]), 0.8).unwrap();
            assert!(b.invariance_defect < 1e-10);
            assert!((b.v2_lab - v2).abs() < 1e-10);
        }
    }

    #[test]
    fn barut_zanghi_circular() {
        let m = 1.5;
        for hbar in [1.0, 0.5] {
            for om_r in [0.3, 0.8, 1.0] {
                let omega = 2.0 * m / hbar;
                let tr = HelicalTrajectory::new(m, om_r / omega, omega, Vector3::new(0.0, 0.4, 0.0), 0.2).unwrap();
                let r = barut_zanghi_check(&tr, 1.3, hbar);
                assert!(r.defect < 1e-12);
                assert!((r.vddot_dot_v - omega * omega * om_r * om_r).abs() < 1e-12 * omega * omega);
                assert_eq!(r.frequency_offset, 0.0);
            }
        }
        let ll = HelicalTrajectory::light_like(m, 1.0, Vector3::zeros(), 0.0).unwrap();
        let r = barut_zanghi_check(&ll, 0.5, 1.0);
        assert!((r.vddot_dot_v - 4.0 * m * m).abs() < 1e-10 && r.v2.abs() < 1e-10);
        let wrong = HelicalTrajectory::new(m, 0.8 / m, m, Vector3::zeros(), 0.0).unwrap();
        let r = barut_zanghi_check(&wrong, 0.5, 1.0);
        let expect = (m * m - 4.0 * m * m) * 0.64 / (4.0 * m * m);
        assert!((r.defect - expect.abs()).abs() < 1e-12);
    }

    #[test]
    fn modulated_radius_profile() {
        let eps = 0.3;
        let tr = helix(0.5, 1.0, [0.4, 0.0, 0.0]).with_modulation(0.1, eps).unwrap();
        let s = v2_time_dependence(&tr, 0.0, 20.0, 201).unwrap();
        assert!(s.max_analytic_defect < 1e-12);
        assert!(s.spread > 0.01);
        // independent oracle: finite-difference r'(tau)
        for (tau, v2) in s.tau.iter().zip(&s.v2) {
            let r = |x: f64| 0.5 * (1.0 + 0.1 * (eps * x).sin());
            let r1 = fd5(r, *tau, 1e-3);
            assert!((v2 - (1.0 - r1 * r1 - r(*tau).powi(2))).abs() < 1e-10);
        }
        let flat = v2_time_dependence(&helix(0.5, 1.0, [0.4, 0.0, 0.0]), 0.0, 20.0, 201).unwrap();
        assert!(flat.spread < 1e-12);
    }

    #[test]
    fn internal_speed_independent_of_drift() {
        for w in [0.0, 1e-6, 0.3, 0.9] {
            let tr = HelicalTrajectory::light_like(1.0, 1.0, Vector3::new(0.0, 0.0, w), 0.4).unwrap();
            assert!((tr.internal(0.7).velocity.norm() - 1.0).abs() < 1e-15);
            assert_eq!(four_velocity_new(&tr, 0.7).t, tr.drift_gamma());
        }
    }

    #[test]
    fn csv_series_leaves_undefined_columns_empty() {
        let tr = HelicalTrajectory::light_like(1.0, 1.0, Vector3::new(0.6, 0.0, 0.0), 0.0).unwrap();
        let mut buf = Vec::new();
        write_series_csv(&sample_series(&tr, &[0.0, 0.5]), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
        assert_eq!(row.len(), 11);
        assert_eq!(row[7], "");
        assert_eq!(row[10], "light-like");
    }
}
