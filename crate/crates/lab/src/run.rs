//! Single experiments: evolve, write every artifact, measure, judge.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use radwave_core::functionals::{DiagnosticsRecorder, DiagnosticsSeries, HyperbolicRecorder, HyperbolicSeries};
use radwave_core::solver::{
    evolve, evolve_hyperbolic, free_wave_exact, HyperbolicState, SolverConfig, Timed, Trajectory,
};
use radwave_core::truncation::{evolve_coupled, split_initial, split_norms, SplitState};
use radwave_core::{RadialField, RadialGrid, WaveState};
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, Mode};
use crate::corpus::{corpus, projection_ratios};
use crate::error::{LabError, LabResult};
use crate::io::{self, CheckpointIndex, SplitCertificate};
use crate::metrics;

pub const SUMMARY_FILE: &str = "summary.json";
pub const SERIES_FILE: &str = "series.csv";
pub const HYPERBOLIC_FILE: &str = "hyperbolic.csv";
pub const LEMMA_FILE: &str = "lemma32.csv";
pub const CONVERGENCE_FILE: &str = "convergence.csv";
pub const CONSISTENCY_FILE: &str = "consistency.csv";
pub const CERTIFICATE_FILE: &str = "certificate.json";
pub const EXACT_FILE: &str = "exact.csv";
pub const CHECKPOINT_DIR: &str = "checkpoints";

pub const LEMMA_HEADER: [&str; 5] = ["field", "j", "sharp_low", "sharp_high", "smooth_low"];
pub const CONVERGENCE_HEADER: [&str; 3] = ["n", "h", "l2_error"];
pub const CONSISTENCY_HEADER: [&str; 2] = ["t", "rel_l2_error"];

/// Thresholds applied by the per-run checks.
pub mod thresholds {
    pub const ENERGY_DRIFT: f64 = 1e-6;
    pub const VIRIAL: f64 = 1e-3;
    pub const MORAWETZ: f64 = 20.0;
    pub const LEMMA32: f64 = 10.0;
    pub const GRONWALL: f64 = 2.0;
    pub const COMPARABILITY: f64 = 0.5;
    pub const CONSISTENCY: f64 = 1e-6;
    pub const ORACLE_ERROR: f64 = 1e-4;
    pub const ORACLE_ORDER: f64 = 1.7;
    pub const HYP_STEP_INCREASE: f64 = 1e-7;
    pub const HYP_CUBIC_DRIFT: f64 = 1e-6;
}

/// The named constants every summary carries; absent ones do not apply to
/// the run's mode.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct Constants {
    pub energy_drift: Option<f64>,
    pub C_gronwall: Option<f64>,
    pub C_morawetz: Option<f64>,
    pub C_lemma32_max: Option<f64>,
    pub hyp_monotonicity_violation: Option<f64>,
}

impl Constants {
    pub fn entries(&self) -> Vec<(&'static str, f64)> {
        [
            ("energy_drift", self.energy_drift),
            ("C_gronwall", self.C_gronwall),
            ("C_morawetz", self.C_morawetz),
            ("C_lemma32_max", self.C_lemma32_max),
            ("hyp_monotonicity_violation", self.hyp_monotonicity_violation),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.map(|v| (k, v)))
        .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    AtMost,
    AtLeast,
}

/// One judged measurement.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub comparison: Comparison,
    pub passed: bool,
}

impl Check {
    pub fn at_most(name: &str, value: f64, threshold: f64) -> Self {
        Check {
            name: name.to_string(),
            value,
            threshold,
            comparison: Comparison::AtMost,
            passed: value <= threshold,
        }
    }

    pub fn at_least(name: &str, value: f64, threshold: f64) -> Self {
        Check {
            name: name.to_string(),
            value,
            threshold,
            comparison: Comparison::AtLeast,
            passed: value >= threshold,
        }
    }

    pub fn describe(&self) -> String {
        let op = match self.comparison {
            Comparison::AtMost => "<=",
            Comparison::AtLeast => ">=",
        };
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        format!("{verdict} {}: {:.6e} {op} {:.3e}", self.name, self.value, self.threshold)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Completed,
    Failed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub config: ExperimentConfig,
    pub status: RunStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub constants: Constants,
    /// Mode-specific measurements, each recomputable from a file on disk.
    pub measured: BTreeMap<String, f64>,
    pub checks: Vec<Check>,
    /// Files written by the run, relative to its output directory.
    pub files: Vec<String>,
    pub wall_time_s: f64,
}

impl RunSummary {
    pub fn passed(&self) -> bool {
        self.status == RunStatus::Completed && self.checks.iter().all(|c| c.passed)
    }

    /// Summary of a run that stopped before producing measurements.
    pub fn failed(config: ExperimentConfig, reason: String, wall_time_s: f64) -> Self {
        RunSummary {
            config,
            status: RunStatus::Failed,
            error: Some(reason),
            constants: Constants::default(),
            measured: BTreeMap::new(),
            checks: Vec::new(),
            files: Vec::new(),
            wall_time_s,
        }
    }

    /// Every recomputable value by name.
    pub fn values(&self) -> Vec<(String, f64)> {
        let mut all: Vec<(String, f64)> =
            self.constants.entries().into_iter().map(|(k, v)| (k.to_string(), v)).collect();
        all.extend(self.measured.iter().map(|(k, v)| (k.clone(), *v)));
        all
    }
}

/// Accumulates what a run produces before the summary is assembled.
#[derive(Default)]
struct Outcome {
    constants: Constants,
    measured: BTreeMap<String, f64>,
    checks: Vec<Check>,
    files: Vec<String>,
}

impl Outcome {
    fn measure(&mut self, name: &str, value: f64) {
        self.measured.insert(name.to_string(), value);
    }
}

/// Runs `config`, writing into `config.out_dir` (required).
///
/// Argument problems come back as errors naming a configuration field;
/// numerical failures are recorded in the returned summary instead.
pub fn run(config: &ExperimentConfig) -> LabResult<RunSummary> {
    config.validate()?;
    let out = config
        .out_dir
        .clone()
        .ok_or_else(|| LabError::invalid("out_dir", "an output directory is required"))?;
    io::ensure_dir(&out)?;
    let start = Instant::now();
    let result = match config.mode {
        Mode::Full | Mode::FreeOracle => run_flat(config, &out),
        Mode::Split => run_split(config, &out),
        Mode::Hyperbolic => run_hyperbolic(config, &out),
    };
    let wall = start.elapsed().as_secs_f64();
    let summary = match result {
        Ok(o) => RunSummary {
            config: config.clone(),
            status: RunStatus::Completed,
            error: None,
            constants: o.constants,
            measured: o.measured,
            checks: o.checks,
            files: o.files,
            wall_time_s: wall,
        },
        Err(LabError::Core(e)) if !matches!(e, radwave_core::Error::InvalidArgument { .. }) => {
            RunSummary::failed(config.clone(), e.to_string(), wall)
        }
        Err(LabError::Core(e)) => return Err(config_error(e)),
        Err(e) => return Err(e),
    };
    io::write_json(&out.join(SUMMARY_FILE), &summary)?;
    Ok(summary)
}

/// Maps a core argument error onto the configuration field that caused it.
fn config_error(e: radwave_core::Error) -> LabError {
    match e {
        radwave_core::Error::InvalidArgument { field, reason } => {
            let path = match field {
                "dt" | "cfl" => "dt_factor".to_string(),
                "a" | "b" | "m" => format!("profile.{field}"),
                other => other.to_string(),
            };
            LabError::invalid(path, reason)
        }
        other => LabError::Core(other),
    }
}

/// Trajectory thinning that leaves about `checkpoints` stored states.
fn keep_every(config: &ExperimentConfig, solver: &SolverConfig) -> usize {
    if config.t_end == 0.0 {
        return 1;
    }
    let steps = (config.t_end / solver.dt - 1e-9).ceil().max(1.0) as usize;
    let recorded = steps.div_ceil(config.record_every);
    recorded.div_ceil(config.checkpoints - 1).max(1)
}

fn write_checkpoints<S: Timed>(
    out: &Path,
    config: &ExperimentConfig,
    traj: &Trajectory<S>,
    fields: impl Fn(&S) -> (f64, RadialField, RadialField),
    o: &mut Outcome,
) -> LabResult<()> {
    let dir = io::ensure_dir(&out.join(CHECKPOINT_DIR))?;
    let mut index = CheckpointIndex {
        times: Vec::new(),
        files: Vec::new(),
        config: serde_json::to_value(config).expect("configuration serializes"),
    };
    for (k, state) in traj.states().iter().enumerate() {
        let (t, u, ut) = fields(state);
        let name = format!("checkpoint_{k:04}.csv");
        io::write_checkpoint(&dir.join(&name), &u, &ut)?;
        index.times.push(t);
        index.files.push(name.clone());
        o.files.push(format!("{CHECKPOINT_DIR}/{name}"));
    }
    io::write_json(&dir.join("index.json"), &index)?;
    o.files.push(format!("{CHECKPOINT_DIR}/index.json"));
    Ok(())
}

/// Projection ratios of the run's data and of the corpus on the run's grid.
fn lemma32(config: &ExperimentConfig, grid: &RadialGrid, data: &RadialField, out: &Path, o: &mut Outcome) -> LabResult<()> {
    let mut fields = vec![data.clone()];
    for entry in corpus(config.seed) {
        fields.push(entry.sample(grid)?);
    }
    let mut rows = Vec::new();
    for (k, f) in fields.iter().enumerate() {
        for r in projection_ratios(f, config.p) {
            rows.push([k as f64, r.j as f64, r.sharp_low, r.sharp_high, r.smooth_low]);
        }
    }
    io::write_table(&out.join(LEMMA_FILE), &LEMMA_HEADER, rows.iter().map(|r| &r[..]))?;
    o.files.push(LEMMA_FILE.into());
    let worst = lemma_max(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>());
    o.constants.C_lemma32_max = Some(worst);
    o.checks.push(Check::at_most("C_lemma32_max", worst, thresholds::LEMMA32));
    Ok(())
}

pub(crate) fn lemma_max(rows: &[Vec<f64>]) -> f64 {
    rows.iter().flat_map(|r| r[2..].iter().copied()).fold(0.0, f64::max)
}

fn write_series(out: &Path, series: &DiagnosticsSeries, o: &mut Outcome) -> LabResult<()> {
    io::write_series(&out.join(SERIES_FILE), series)?;
    o.files.push(SERIES_FILE.into());
    Ok(())
}

fn run_flat(config: &ExperimentConfig, out: &Path) -> LabResult<Outcome> {
    let mut o = Outcome::default();
    let grid = config.radial_grid()?;
    let initial = config.initial_state(&grid)?;
    let solver = config.solver(&grid);
    let solver = solver.clone().with_keep_every(keep_every(config, &solver));
    let mut rec = DiagnosticsRecorder::new(config.p, config.nonlinearity(), config.c_morawetz);
    let traj = evolve(&initial, &solver, &mut [&mut rec])?;
    let series = rec.finish()?;
    write_series(out, &series, &mut o)?;
    write_checkpoints(out, config, &traj, |s: &WaveState| (s.time, s.u.clone(), s.ut.clone()), &mut o)?;

    let drift = metrics::energy_drift(&series);
    o.constants.energy_drift = Some(drift);
    let virial = metrics::virial_relative(&series);
    o.measure("virial_residual", virial);
    o.checks.push(Check::at_most("virial_residual", virial, thresholds::VIRIAL));

    if config.mode == Mode::Full {
        o.checks.push(Check::at_most("energy_drift", drift, thresholds::ENERGY_DRIFT));
        let budget = metrics::morawetz_constant(&series);
        o.constants.C_morawetz = Some(budget);
        o.checks.push(Check::at_most("C_morawetz", budget, thresholds::MORAWETZ));
        o.measure("exterior_fraction", metrics::exterior_fraction(&series));
        lemma32(config, &grid, &initial.u, out, &mut o)?;
    } else {
        free_oracle(config, traj.last(), out, &mut o)?;
    }
    Ok(o)
}

/// Errors against the exact free solution at `n/4`, `n/2` and `n` points.
fn free_oracle(config: &ExperimentConfig, finest: &WaveState, out: &Path, o: &mut Outcome) -> LabResult<()> {
    let profile = config.profile.to_profile()?;
    let n = config.grid.n;
    let mut rows = Vec::new();
    for level in [n / 4, n / 2] {
        let grid = config.grid_with(level)?;
        let solver = config.solver(&grid).with_keep_every(0);
        let end = evolve(&config.initial_state(&grid)?, &solver, &mut [])?.into_last();
        rows.push(oracle_row(config, &profile, &end)?);
    }
    rows.push(oracle_row(config, &profile, finest)?);
    let exact = free_wave_exact(&profile, finest.time, finest.grid())?.scaled(config.amplitude);
    io::write_field(&out.join(EXACT_FILE), &exact)?;
    io::write_table(&out.join(CONVERGENCE_FILE), &CONVERGENCE_HEADER, rows.iter().map(|r| &r[..]))?;
    o.files.extend([EXACT_FILE.into(), CONVERGENCE_FILE.into()]);
    let (error, slope) = convergence_from(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>());
    o.measure("l2_error_vs_exact", error);
    o.checks.push(Check::at_most("l2_error_vs_exact", error, thresholds::ORACLE_ERROR));
    if let Some(slope) = slope {
        o.measure("convergence_slope", slope);
        o.checks.push(Check::at_least("convergence_slope", slope, thresholds::ORACLE_ORDER));
    }
    Ok(())
}

fn oracle_row(config: &ExperimentConfig, profile: &radwave_core::Profile, end: &WaveState) -> LabResult<[f64; 3]> {
    let grid = end.grid();
    let exact = free_wave_exact(profile, end.time, grid)?.scaled(config.amplitude);
    let error = end.u.sub(&exact)?.l2_norm();
    Ok([grid.len() as f64, grid.spacing(), error])
}

/// Finest-grid error and fitted order from convergence rows.
pub(crate) fn convergence_from(rows: &[Vec<f64>]) -> (f64, Option<f64>) {
    let h: Vec<f64> = rows.iter().map(|r| r[1]).collect();
    let err: Vec<f64> = rows.iter().map(|r| r[2]).collect();
    (err[err.len() - 1], metrics::convergence_slope(&h, &err))
}

fn run_split(config: &ExperimentConfig, out: &Path) -> LabResult<Outcome> {
    let mut o = Outcome::default();
    let grid = config.radial_grid()?;
    let initial = config.initial_state(&grid)?;
    let ss = split_initial(&initial, config.p, config.epsilon)?;
    let norms = split_norms(&ss, config.p)?;
    io::write_json(&out.join(CERTIFICATE_FILE), &SplitCertificate::new(ss.lambda, ss.epsilon, &norms))?;
    o.files.push(CERTIFICATE_FILE.into());

    let solver = config.solver(&grid);
    let solver = solver.clone().with_keep_every(keep_every(config, &solver));
    let mut rec = DiagnosticsRecorder::new(config.p, config.nonlinearity(), config.c_morawetz);
    let traj = evolve_coupled(&ss, &solver, &mut [&mut rec])?;
    let series = rec.finish()?;
    write_series(out, &series, &mut o)?;
    write_checkpoints(
        out,
        config,
        &traj,
        |s: &SplitState| {
            let u = s.combined();
            (s.time(), u.u, u.ut)
        },
        &mut o,
    )?;

    // the split must agree with solving the rescaled data directly
    let direct = evolve(&ss.combined(), &solver.clone().with_keep_every(0), &mut [])?.into_last();
    let sum = traj.last().combined();
    let scale = direct.u.l2_norm();
    let gap = sum.u.sub(&direct.u)?.l2_norm();
    let consistency = if scale == 0.0 { gap } else { gap / scale };
    let row = [direct.time, consistency];
    io::write_table(&out.join(CONSISTENCY_FILE), &CONSISTENCY_HEADER, [&row[..]])?;
    o.files.push(CONSISTENCY_FILE.into());

    let gronwall = metrics::gronwall_constant(&series);
    o.constants.C_gronwall = Some(gronwall);
    o.checks.push(Check::at_most("C_gronwall", gronwall, thresholds::GRONWALL));
    let comparability = metrics::energy_comparability(&series);
    o.measure("energy_comparability", comparability);
    o.checks.push(Check::at_most("energy_comparability", comparability, thresholds::COMPARABILITY));
    o.measure("truncation_consistency", consistency);
    o.checks.push(Check::at_most("truncation_consistency", consistency, thresholds::CONSISTENCY));
    o.measure("w_growth", metrics::smallness_growth(&series, ss.epsilon));
    o.checks.push(Check::at_most("w0_smallness", norms.smallness() / ss.epsilon, 1.0));
    lemma32(config, &grid, &ss.v.u, out, &mut o)?;
    Ok(o)
}

fn run_hyperbolic(config: &ExperimentConfig, out: &Path) -> LabResult<Outcome> {
    let mut o = Outcome::default();
    let grid = config.radial_grid()?;
    let profile = config.profile.to_profile()?;
    let hs = HyperbolicState::from_profile(&profile, config.amplitude, &grid)?;
    let solver = config.solver(&grid);
    let solver = solver.clone().with_keep_every(keep_every(config, &solver));
    let mut rec = HyperbolicRecorder::new(config.p, config.nonlinearity());
    let traj = evolve_hyperbolic(&hs, &solver, &mut [&mut rec])?;
    let series: HyperbolicSeries = rec.finish()?;
    io::write_hyperbolic_series(&out.join(HYPERBOLIC_FILE), &series)?;
    o.files.push(HYPERBOLIC_FILE.into());
    write_checkpoints(
        out,
        config,
        &traj,
        |s: &HyperbolicState| (s.tau, s.u_tilde.clone(), s.ut_tilde.clone()),
        &mut o,
    )?;

    let violation = metrics::hyp_monotonicity(&series);
    o.constants.hyp_monotonicity_violation = Some(violation);
    let drift = metrics::hyp_energy_drift(&series);
    o.measure("hyp_energy_drift", drift);
    if config.p == 3.0 {
        o.checks.push(Check::at_most("hyp_energy_drift", drift, thresholds::HYP_CUBIC_DRIFT));
    } else {
        o.checks.push(Check::at_most(
            "hyp_monotonicity_violation",
            violation,
            thresholds::HYP_STEP_INCREASE,
        ));
    }
    let virial = metrics::hyp_virial_relative(&series);
    o.measure("hyp_virial_residual", virial);
    o.checks.push(Check::at_most("hyp_virial_residual", virial, thresholds::VIRIAL));
    Ok(o)
}

/// Recomputes the value `name` of a finished run from the files in `dir`.
pub fn recompute(dir: &Path, name: &str, epsilon: f64) -> LabResult<f64> {
    let series = || io::read_series(&dir.join(SERIES_FILE));
    let hyperbolic = || io::read_hyperbolic_series(&dir.join(HYPERBOLIC_FILE));
    let table = |file: &str, header: &[&str]| io::read_table(&dir.join(file), header);
    Ok(match name {
        "energy_drift" => metrics::energy_drift(&series()?),
        "C_gronwall" => metrics::gronwall_constant(&series()?),
        "C_morawetz" => metrics::morawetz_constant(&series()?),
        "virial_residual" => metrics::virial_relative(&series()?),
        "energy_comparability" => metrics::energy_comparability(&series()?),
        "exterior_fraction" => metrics::exterior_fraction(&series()?),
        "w_growth" => metrics::smallness_growth(&series()?, epsilon),
        "C_lemma32_max" => lemma_max(&table(LEMMA_FILE, &LEMMA_HEADER)?),
        "hyp_monotonicity_violation" => metrics::hyp_monotonicity(&hyperbolic()?),
        "hyp_energy_drift" => metrics::hyp_energy_drift(&hyperbolic()?),
        "hyp_virial_residual" => metrics::hyp_virial_relative(&hyperbolic()?),
        "truncation_consistency" => table(CONSISTENCY_FILE, &CONSISTENCY_HEADER)?[0][1],
        "l2_error_vs_exact" => convergence_from(&table(CONVERGENCE_FILE, &CONVERGENCE_HEADER)?).0,
        "convergence_slope" => convergence_from(&table(CONVERGENCE_FILE, &CONVERGENCE_HEADER)?)
            .1
            .ok_or_else(|| LabError::invalid(name, "convergence rows admit no slope"))?,
        other => return Err(LabError::invalid(other, "no recipe recomputes this value")),
    })
}

