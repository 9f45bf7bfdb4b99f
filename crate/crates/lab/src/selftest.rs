//! Built-in acceptance suite: a fixed set of runs plus static checks on the
//! corpus, judged together and reported.

use std::path::Path;

use radwave_core::spectral::{critical_exponent, rescale, smooth_project, sobolev_norm};
use radwave_core::{RadialField, RadialGrid, WaveState};
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, GridSpec, Mode, ProfileSpec};
use crate::corpus::corpus;
use crate::error::LabResult;
use crate::io;
use crate::report::{report_dir, Report};
use crate::run::{run, Check, RunSummary};

pub const STATIC_FILE: &str = "static_checks.json";
pub const COMPLETENESS_TOL: f64 = 1e-6;
pub const SCALING_TOL: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    /// Coarse grids; seconds.
    Quick,
    /// The documented acceptance resolutions; minutes.
    Full,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelftestOutcome {
    pub runs: Vec<(String, RunSummary)>,
    pub static_checks: Vec<Check>,
    pub report: Report,
}

impl SelftestOutcome {
    pub fn passed(&self) -> bool {
        self.report.all_passed && self.static_checks.iter().all(|c| c.passed)
    }
}

fn gaussian() -> ProfileSpec {
    ProfileSpec::Gaussian { a: 1.0 }
}

/// The named runs of the suite at `scale`.
pub fn plan(scale: Scale) -> Vec<(&'static str, ExperimentConfig)> {
    let quick = scale == Scale::Quick;
    let pick = |q: usize, f: usize| if quick { q } else { f };
    let mut oracle = ExperimentConfig::new(
        4.0,
        gaussian(),
        GridSpec {
            r_max: 20.0,
            n: pick(1024, 4096),
        },
        pick(2, 5) as f64,
        Mode::FreeOracle,
    );
    oracle.dt_factor = 0.25;

    let mut full = ExperimentConfig::new(
        4.0,
        gaussian(),
        GridSpec {
            r_max: 20.0,
            n: pick(512, 4096),
        },
        pick(2, 10) as f64,
        Mode::Full,
    );
    full.dt_factor = if quick { 1.0 / 64.0 } else { 0.125 };

    let mut split = ExperimentConfig::new(
        4.0,
        gaussian(),
        GridSpec {
            r_max: 64.0,
            n: pick(1023, 2047),
        },
        pick(2, 10) as f64,
        Mode::Split,
    );
    split.epsilon = 0.05;

    let hyperbolic = |p: f64, dt_factor: f64| {
        let mut cfg = ExperimentConfig::new(
            p,
            gaussian(),
            GridSpec {
                r_max: 12.0,
                n: pick(511, 2047),
            },
            pick(1, 2) as f64,
            Mode::Hyperbolic,
        );
        cfg.amplitude = 2.0;
        cfg.dt_factor = dt_factor;
        cfg
    };
    vec![
        ("free_oracle", oracle),
        ("full", full),
        ("split", split),
        ("hyperbolic_p4", hyperbolic(4.0, 0.25)),
        ("hyperbolic_p3", hyperbolic(3.0, if quick { 1.0 / 64.0 } else { 0.0625 })),
    ]
}

/// `‖f − Σ_{j≤J} P̃_j f‖ / ‖f‖` with the first `J` such that
/// `2^J ≥ 4·Nyquist`.
pub fn completeness_error(f: &RadialField) -> f64 {
    let top = (4.0 * f.grid().nyquist()).log2().ceil().max(0.0) as u32;
    let mut sum = RadialField::zeros(f.grid());
    for j in 0..=top {
        sum = sum.add(&smooth_project(f, j)).expect("same grid");
    }
    sum.sub(f).expect("same grid").l2_norm() / f.l2_norm()
}

/// Largest relative change of `‖u‖_{Ḣ^{s_c}}` under `λ ∈ {½, 2}`.
pub fn scaling_defect(state: &WaveState, p: f64) -> LabResult<f64> {
    let sc = critical_exponent(p)?;
    let base = sobolev_norm(&state.u, sc)?;
    let mut worst: f64 = 0.0;
    for lambda in [0.5, 2.0] {
        let scaled = rescale(state, lambda, p)?;
        worst = worst.max((sobolev_norm(&scaled.u, sc)? - base).abs() / base);
    }
    Ok(worst)
}

fn static_checks(scale: Scale, seed: u64) -> LabResult<Vec<Check>> {
    let n = if scale == Scale::Quick { 511 } else { 2047 };
    let grid = RadialGrid::new(20.0, n)?;
    let mut completeness: f64 = 0.0;
    for entry in corpus(seed) {
        completeness = completeness.max(completeness_error(&entry.sample(&grid)?));
    }
    let state = WaveState::at_rest(gaussian().to_profile()?.sample(&grid)?);
    let mut scaling: f64 = 0.0;
    for p in [3.5, 4.0, 4.5] {
        scaling = scaling.max(scaling_defect(&state, p)?);
    }
    Ok(vec![
        Check::at_most("smoothed_completeness", completeness, COMPLETENESS_TOL),
        Check::at_most("critical_scaling", scaling, SCALING_TOL),
    ])
}

/// Runs the suite into `out`, one subdirectory per run, and reports on it.
pub fn selftest(out: &Path, scale: Scale) -> LabResult<SelftestOutcome> {
    io::ensure_dir(out)?;
    let mut runs = Vec::new();
    for (name, mut cfg) in plan(scale) {
        cfg.out_dir = Some(out.join(name));
        runs.push((name.to_string(), run(&cfg)?));
    }
    let static_checks = static_checks(scale, 0)?;
    io::write_json(&out.join(STATIC_FILE), &static_checks)?;
    let report = report_dir(out)?;
    Ok(SelftestOutcome {
        runs,
        static_checks,
        report,
    })
}
