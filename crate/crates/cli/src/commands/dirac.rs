//! `zbw dirac`: Gordon split of the Dirac current for random plane-wave
//! superpositions, `p.j = m` for single waves and the beat average.

use std::io::Write;

use nalgebra::Vector3;
use rand::Rng;
use serde::Serialize;
use zbw_core::dirac::{
    current_divergence, dirac_current, footnote_identity_check, gordon_decompose, gordon_residual, random_momentum,
    time_average_check, DiracPlaneWaveState, GammaAlgebra, PlaneWave, Spin, TimeAverageReport,
};
use zbw_core::numeric::seeded_rng;
use zbw_core::relkin::FourVector;

use super::finish;
use crate::args::DiracArgs;
use crate::report::{Checklist, OutDir};
use crate::{CliError, Context, Outcome};

/// Sample points are drawn from `[0, T] x [-L, L]^3`.
const SPAN_T: f64 = 10.0;
const SPAN_X: f64 = 10.0;
const BEAT_SAMPLES: usize = 256;

#[derive(Debug, Clone, Serialize)]
pub struct DiracParams {
    pub waves: usize,
    pub samples: usize,
    pub footnote_samples: usize,
    pub max_speed: f64,
    pub rest_frame: bool,
}

impl DiracParams {
    pub fn resolve(ctx: &Context, a: &DiracArgs) -> Result<Self, CliError> {
        let s = &ctx.settings;
        let p = DiracParams {
            waves: s.pick("waves", a.waves, 2)?,
            samples: s.pick("samples", a.samples, 200)?,
            footnote_samples: s.pick("footnote-samples", a.footnote_samples, 50)?,
            max_speed: s.pick("max-speed", a.max_speed, 0.9)?,
            rest_frame: s.pick("rest-frame", a.rest_frame, false)?,
        };
        if p.waves == 0 {
            return Err(CliError::Usage("--waves must be at least 1".into()));
        }
        if !(0.0..1.0).contains(&p.max_speed) {
            return Err(CliError::Usage(format!(
                "--max-speed must lie in [0, 1), got {}",
                p.max_speed
            )));
        }
        Ok(p)
    }
}

#[derive(Debug, Serialize)]
struct SampleRow {
    waves: Vec<PlaneWave>,
    x: [f64; 4],
    current: [f64; 4],
    convective: [f64; 4],
    spin_term: [f64; 4],
    residual: f64,
    divergence: f64,
}

#[derive(Debug, Serialize)]
struct DiracOutput<'a> {
    parameters: &'a DiracParams,
    gamma_defect: f64,
    gordon_max: f64,
    divergence_max: f64,
    spin_term_max: f64,
    footnote_max: f64,
    rest_frame_max: Option<f64>,
    time_average: Option<TimeAverageReport>,
    samples: &'a [SampleRow],
}

pub fn execute(ctx: &Context, p: &DiracParams, out: &mut OutDir, checks: &mut Checklist) -> Result<(), CliError> {
    let mass = ctx.constants.mass;
    let mut rng = seeded_rng(ctx.seed);

    let g = GammaAlgebra::dirac();
    let gamma_defect = g
        .anticommutator_defect()
        .max(g.hermiticity_defect())
        .max(g.spin_tensor_antisymmetry_defect());
    checks.at_most("dirac.gamma", "{gamma^mu, gamma^nu} = 2 g^{mu nu}", gamma_defect);

    let mut rows = Vec::with_capacity(p.samples);
    for _ in 0..p.samples {
        let n = rng.gen_range(1..=p.waves);
        let state = DiracPlaneWaveState::random(&mut rng, n, mass, p.max_speed)?;
        let t = rng.gen_range(0.0..SPAN_T);
        let pos = Vector3::new(
            rng.gen_range(-SPAN_X..SPAN_X),
            rng.gen_range(-SPAN_X..SPAN_X),
            rng.gen_range(-SPAN_X..SPAN_X),
        );
        let x = FourVector::new(t, pos);
        let terms = gordon_decompose(&state, &x);
        rows.push(SampleRow {
            waves: state.descriptors(),
            x: x.as_array(),
            current: dirac_current(&state, &x).as_array(),
            convective: terms.convective.as_array(),
            spin_term: terms.spin_term.as_array(),
            residual: gordon_residual(&state, &x),
            divergence: current_divergence(&state, &x),
        });
    }
    let fold = |f: &dyn Fn(&SampleRow) -> f64| rows.iter().map(f).fold(0.0, f64::max);
    let gordon_max = fold(&|r| r.residual);
    let divergence_max = fold(&|r| r.divergence);
    let spin_term_max = fold(&|r| r.spin_term.iter().map(|c| c.abs()).fold(0.0, f64::max));
    checks.at_most("dirac.gordon", "j = convective + spin term, componentwise", gordon_max);
    checks.at_most("dirac.conservation", "d_mu j^mu = 0", divergence_max);
    if p.waves == 1 {
        checks.at_most(
            "dirac.spin-term",
            "spin term vanishes for a single plane wave",
            spin_term_max,
        );
    } else {
        checks.report("dirac.spin-term", "largest spin-term component", spin_term_max);
    }

    let mut footnote_max = 0.0_f64;
    for _ in 0..p.footnote_samples {
        let speed = rng.gen_range(0.0..=p.max_speed);
        let mom = random_momentum(&mut rng, mass, speed);
        let spin = if rng.gen_bool(0.5) { Spin::Up } else { Spin::Down };
        footnote_max = footnote_max.max((footnote_identity_check(&mom, spin, mass)? - mass).abs());
    }
    checks.at_most("dirac.footnote", "p.j = m for a unit plane wave", footnote_max);

    let rest_frame_max = if p.rest_frame {
        let rest = FourVector::new(mass, Vector3::zeros());
        let mut worst = 0.0_f64;
        for spin in [Spin::Up, Spin::Down] {
            worst = worst.max((footnote_identity_check(&rest, spin, mass)? - mass).abs());
        }
        checks.at_most("dirac.rest-frame", "p.j = m at rest", worst);
        Some(worst)
    } else {
        None
    };

    let time_average = if p.waves >= 2 {
        let state = DiracPlaneWaveState::random(&mut rng, 2, mass, p.max_speed)?;
        let r = time_average_check(&state, Vector3::zeros(), BEAT_SAMPLES)?;
        checks.at_most("dirac.time-average", "beat average = sum |c_k|^2 p_k/m", r.defect);
        Some(r)
    } else {
        None
    };

    out.write_with("gordon_samples.csv", |w| {
        writeln!(
            w,
            "sample,waves,t,x,y,z,j0,j1,j2,j3,spin0,spin1,spin2,spin3,residual,divergence"
        )?;
        for (k, r) in rows.iter().enumerate() {
            write!(w, "{k},{}", r.waves.len())?;
            for v in r.x.iter().chain(&r.current).chain(&r.spin_term) {
                write!(w, ",{v:e}")?;
            }
            writeln!(w, ",{:e},{:e}", r.residual, r.divergence)?;
        }
        Ok(())
    })?;
    out.write_json(
        "dirac_report.json",
        &DiracOutput {
            parameters: p,
            gamma_defect,
            gordon_max,
            divergence_max,
            spin_term_max,
            footnote_max,
            rest_frame_max,
            time_average,
            samples: &rows,
        },
    )
}

pub fn command(ctx: &Context, a: &DiracArgs) -> Result<Outcome, CliError> {
    let p = DiracParams::resolve(ctx, a)?;
    let mut out = OutDir::create(&ctx.out)?;
    let mut checks = Checklist::new(&ctx.tolerances);
    execute(ctx, &p, &mut out, &mut checks)?;
    finish(ctx, out, "dirac", &p, checks.into_checks())
}
