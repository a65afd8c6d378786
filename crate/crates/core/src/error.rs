use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("degenerate state: every node lies below the density floor {floor:.3e}")]
    DegenerateState { floor: f64 },
    #[error("phase is not simply connected (vortex) near node {node}: jump {jump:.3} rad along axis {axis}")]
    Vortex { node: usize, axis: usize, jump: f64 },
    #[error("state not contained: boundary amplitude ratio {ratio:.3e} exceeds {limit:.1e}")]
    Containment { ratio: f64, limit: f64 },
    #[error("time step {dt:.3e} violates stability bound {bound:.3e}")]
    Stability { dt: f64, bound: f64 },
    #[error("centre-of-mass speed {speed} is not sub-luminal")]
    SuperluminalDrift { speed: f64 },
    #[error("standard four-velocity undefined: charge speed |v| = {speed} >= 1 (no proper time for the charge)")]
    StandardVelocityUndefined { speed: f64 },
    #[error("momentum is off shell: p.p - m^2 = {defect:.3e}")]
    OffShell { defect: f64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
