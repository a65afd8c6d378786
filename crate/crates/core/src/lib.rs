//! Numerical laboratory for the hydrodynamic picture of spinning particles.
//!
//! The crate is organised bottom-up:
//!
//! * [`fieldcalc`] - uniform grids, fields and second-order vector calculus.
//! * [`madelung`] - polar decomposition, quantum potential and the
//!   Hamilton-Jacobi / continuity residuals of the Madelung fluid.
//! * [`pauli`] - spin density, Pauli current and its split into drift and
//!   zitterbewegung parts.
//! * [`evolve`] - analytic state presets and a Crank-Nicolson propagator.
//! * [`relkin`] - centre-of-mass proper time, four-velocities and the
//!   kinematic invariants of helical (zitterbewegung) trajectories.
//! * [`dirac`] - gamma matrices, plane-wave spinors and the Gordon split of
//!   the Dirac current.
//!
//! Every check returns a plain report struct which serializes with serde.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dirac;
pub mod error;
pub mod evolve;
pub mod fieldcalc;
pub mod madelung;
pub mod numeric;
pub mod pauli;
pub mod relkin;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Physical constants shared by every field computation (natural units, c = 1).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Constants {
    pub hbar: f64,
    pub mass: f64,
    pub charge: f64,
}

impl Default for Constants {
    fn default() -> Self {
        Constants {
            hbar: 1.0,
            mass: 1.0,
            charge: -1.0,
        }
    }
}

impl Constants {
    pub fn validate(&self) -> Result<()> {
        if !(self.hbar > 0.0 && self.hbar.is_finite()) {
            return Err(Error::Config(format!("hbar must be positive, got {}", self.hbar)));
        }
        if !(self.mass > 0.0 && self.mass.is_finite()) {
            return Err(Error::Config(format!("mass must be positive, got {}", self.mass)));
        }
        if !self.charge.is_finite() {
            return Err(Error::Config("charge must be finite".into()));
        }
        Ok(())
    }
}
