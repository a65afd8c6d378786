//! Command-line grammar. Every option also reads `ZBW_<NAME>` from the
//! environment; values left unset fall through to `--config` and then to
//! built-in defaults.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "zbw",
    version,
    about = "Verification suites for the hydrodynamic picture of spinning particles"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Reduced Planck constant (default 1)
    #[arg(long, global = true, env = "ZBW_HBAR")]
    pub hbar: Option<f64>,
    /// Particle mass (default 1)
    #[arg(long, global = true, env = "ZBW_MASS")]
    pub mass: Option<f64>,
    /// Particle charge (default -1)
    #[arg(long, global = true, env = "ZBW_CHARGE", allow_hyphen_values = true)]
    pub charge: Option<f64>,
    /// Output directory (default zbw-out)
    #[arg(long, global = true, env = "ZBW_OUT")]
    pub out: Option<PathBuf>,
    /// Seed for every random draw (default 7)
    #[arg(long, global = true, env = "ZBW_SEED")]
    pub seed: Option<u64>,
    /// Flat `key = value` file mirroring the long options
    #[arg(long, global = true, env = "ZBW_CONFIG")]
    pub config: Option<PathBuf>,
    /// Tolerance override `CHECK=VALUE`, repeatable
    #[arg(
        long = "tol",
        global = true,
        env = "ZBW_TOL",
        value_delimiter = ',',
        value_name = "CHECK=VALUE"
    )]
    pub tol: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Quantum potential, Hamilton-Jacobi and continuity residuals
    Madelung(MadelungArgs),
    /// Pauli current split, internal velocity and energy identities
    Pauli(PauliArgs),
    /// Four-velocities and invariants on helical trajectories
    Helix(HelixArgs),
    /// Gordon split of the Dirac current for plane-wave superpositions
    Dirac(DiracArgs),
    /// Every asserted check with a summary
    Suite(SuiteArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MadelungPreset {
    HoGround,
    PlaneWave,
    Gaussian,
}

impl std::str::FromStr for MadelungPreset {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        <Self as ValueEnum>::from_str(s, false)
    }
}

#[derive(Debug, Args)]
pub struct MadelungArgs {
    #[arg(long, env = "ZBW_PRESET")]
    pub preset: Option<MadelungPreset>,
    /// Nodes on the coarsest grid (default 256)
    #[arg(long, env = "ZBW_GRID")]
    pub grid: Option<usize>,
    /// Number of grid levels, each doubling the node count (default 1)
    #[arg(long, env = "ZBW_REFINE")]
    pub refine: Option<usize>,
    /// Shift added to the energy in the Hamilton-Jacobi check (report mode)
    #[arg(long = "perturb-E", env = "ZBW_PERTURB_E", allow_hyphen_values = true)]
    pub perturb_e: Option<f64>,
    /// Oscillator frequency (default 1)
    #[arg(long, env = "ZBW_OMEGA")]
    pub omega: Option<f64>,
    /// Momentum of plane waves and packets (default 1)
    #[arg(long, env = "ZBW_MOMENTUM", allow_hyphen_values = true)]
    pub momentum: Option<f64>,
    /// Packet width (default 1)
    #[arg(long, env = "ZBW_SIGMA")]
    pub sigma: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PauliState {
    GaussianUp,
    PlaneWaveUp,
}

impl std::str::FromStr for PauliState {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        <Self as ValueEnum>::from_str(s, false)
    }
}

#[derive(Debug, Args)]
pub struct PauliArgs {
    #[arg(long, env = "ZBW_STATE")]
    pub state: Option<PauliState>,
    /// Nodes per axis of the square grid (default 64)
    #[arg(long, env = "ZBW_GRID")]
    pub grid: Option<usize>,
    /// Spin magnitude in units of hbar/2 for the energy split (default 1)
    #[arg(long = "spin-scale", env = "ZBW_SPIN_SCALE")]
    pub spin_scale: Option<f64>,
    /// Drift momentum along x (default 0.5)
    #[arg(long, env = "ZBW_MOMENTUM", allow_hyphen_values = true)]
    pub momentum: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HelixPreset {
    Custom,
    LightLike,
}

impl std::str::FromStr for HelixPreset {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        <Self as ValueEnum>::from_str(s, false)
    }
}

#[derive(Debug, Args)]
pub struct HelixArgs {
    #[arg(long, env = "ZBW_PRESET")]
    pub preset: Option<HelixPreset>,
    /// CM drift speed along x (default 0)
    #[arg(long, env = "ZBW_BOOST", allow_hyphen_values = true)]
    pub boost: Option<f64>,
    /// Orbit radius; overrides --omega-ratio
    #[arg(long = "R", env = "ZBW_R")]
    pub radius: Option<f64>,
    /// Angular frequency (default 1, or 2m/hbar with --bz-check)
    #[arg(long, env = "ZBW_OMEGA", allow_hyphen_values = true)]
    pub omega: Option<f64>,
    /// Internal speed Omega R (default 0.5)
    #[arg(long = "omega-ratio", env = "ZBW_OMEGA_RATIO")]
    pub omega_ratio: Option<f64>,
    /// Orbit phase at tau = 0 (default 0)
    #[arg(long, env = "ZBW_PHASE", allow_hyphen_values = true)]
    pub phase: Option<f64>,
    /// Check v^2 = 1 - hbar^2 a.v / 4m^2 with a = dv/dtau twice
    #[arg(long = "bz-check", env = "ZBW_BZ_CHECK", num_args = 0..=1, require_equals = true, default_missing_value = "true")]
    pub bz_check: Option<bool>,
    /// Relative radius modulation amplitude (default 0)
    #[arg(long, env = "ZBW_MODULATION", allow_hyphen_values = true)]
    pub modulation: Option<f64>,
    /// Radius modulation rate in CM proper time (default 0.3)
    #[arg(long = "modulation-rate", env = "ZBW_MODULATION_RATE")]
    pub modulation_rate: Option<f64>,
    /// Samples along the trajectory (default 101)
    #[arg(long, env = "ZBW_SAMPLES")]
    pub samples: Option<usize>,
    /// Last lab time sampled (default 10)
    #[arg(long = "t-max", env = "ZBW_T_MAX")]
    pub t_max: Option<f64>,
}

#[derive(Debug, Args)]
pub struct DiracArgs {
    /// Plane waves per random state (default 2)
    #[arg(long, env = "ZBW_WAVES")]
    pub waves: Option<usize>,
    /// Random (state, point) pairs (default 200)
    #[arg(long, env = "ZBW_SAMPLES")]
    pub samples: Option<usize>,
    /// Random on-shell momenta for p.j = m (default 50)
    #[arg(long = "footnote-samples", env = "ZBW_FOOTNOTE_SAMPLES")]
    pub footnote_samples: Option<usize>,
    /// Largest wave speed (default 0.9)
    #[arg(long = "max-speed", env = "ZBW_MAX_SPEED")]
    pub max_speed: Option<f64>,
    /// Also evaluate p.j for the rest-frame spinors
    #[arg(long = "rest-frame", env = "ZBW_REST_FRAME", num_args = 0..=1, require_equals = true, default_missing_value = "true")]
    pub rest_frame: Option<bool>,
}

#[derive(Debug, Args)]
pub struct SuiteArgs {
    /// Print the summary as JSON on stdout
    #[arg(long, env = "ZBW_JSON", num_args = 0..=1, require_equals = true, default_missing_value = "true")]
    pub json: Option<bool>,
}
