//! Cartesian sweeps over configuration fields, one directory per cell.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::ExperimentConfig;
use crate::error::{LabError, LabResult};
use crate::io;
use crate::run::{run, RunSummary};

pub const DEFAULT_CAP: usize = 256;
pub const THREADS_ENV: &str = "RW_THREADS";
pub const SWEEP_TABLE: &str = "sweep.csv";
pub const SWEEP_JSON: &str = "sweep.json";

/// One swept field: a dotted configuration path and its values.
#[derive(Clone, Debug, PartialEq)]
pub struct Axis {
    pub path: String,
    pub values: Vec<Value>,
}

impl Axis {
    /// Parses `path=v1,v2,…`; each value is read as JSON, falling back to
    /// a plain string.
    pub fn parse(spec: &str) -> LabResult<Self> {
        let (path, list) = spec
            .split_once('=')
            .ok_or_else(|| LabError::invalid("axis", format!("`{spec}` is not of the form field=v1,v2")))?;
        let path = path.trim();
        if path.is_empty() {
            return Err(LabError::invalid("axis", "empty field path"));
        }
        let values: Vec<Value> = list
            .split(',')
            .map(str::trim)
            .filter(|v| !v.is_empty())
            .map(|v| serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.to_string())))
            .collect();
        if values.is_empty() {
            return Err(LabError::invalid(path, "axis has no values"));
        }
        Ok(Axis {
            path: path.to_string(),
            values,
        })
    }
}

/// Worker count: `RW_THREADS` when set and positive, else the machine's.
pub fn thread_count() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// One cell of the product, in row-major order over the axes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub index: usize,
    pub assignment: Vec<(String, Value)>,
    pub summary: RunSummary,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepOutcome {
    pub axes: Vec<String>,
    pub cells: Vec<Cell>,
}

impl SweepOutcome {
    pub fn summaries(&self) -> impl Iterator<Item = &RunSummary> {
        self.cells.iter().map(|c| &c.summary)
    }

    pub fn passed(&self) -> bool {
        self.summaries().all(RunSummary::passed)
    }
}

fn product(axes: &[Axis]) -> Vec<Vec<(String, Value)>> {
    axes.iter().fold(vec![Vec::new()], |acc, axis| {
        acc.into_iter()
            .flat_map(|prefix| {
                axis.values.iter().map(move |v| {
                    let mut next = prefix.clone();
                    next.push((axis.path.clone(), v.clone()));
                    next
                })
            })
            .collect()
    })
}

/// Runs every combination of `axes` over `base`, cells in parallel.
///
/// A cell whose configuration is invalid or whose run fails is reported as
/// a failed summary; unknown axis fields and an oversized product are
/// rejected before anything runs.
pub fn sweep(base: &ExperimentConfig, axes: &[Axis], out: &Path, cap: usize, threads: usize) -> LabResult<SweepOutcome> {
    base.validate()?;
    let total = axes
        .iter()
        .try_fold(1usize, |n, a| n.checked_mul(a.values.len()))
        .unwrap_or(usize::MAX);
    if total > cap {
        return Err(LabError::invalid("axes", format!("{total} cells exceed the cap of {cap}")));
    }
    if let Some(axis) = axes.iter().find(|a| !base.has_field(&a.path)) {
        return Err(LabError::invalid(axis.path.clone(), "no such configuration field"));
    }
    io::ensure_dir(out)?;
    let assignments = product(axes);
    let job = |(index, assignment): (usize, Vec<(String, Value)>)| {
        let dir = out.join(format!("cell_{index:03}"));
        let summary = cell_config(base, &assignment)
            .map(|mut cfg| {
                cfg.out_dir = Some(dir.clone());
                cfg
            })
            .and_then(|cfg| run(&cfg).or_else(|e| Ok(RunSummary::failed(cfg, e.to_string(), 0.0))))
            .unwrap_or_else(|e: LabError| {
                let mut cfg = base.clone();
                cfg.out_dir = Some(dir);
                RunSummary::failed(cfg, e.to_string(), 0.0)
            });
        Cell {
            index,
            assignment,
            summary,
        }
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| LabError::invalid(THREADS_ENV, e.to_string()))?;
    let cells: Vec<Cell> = pool.install(|| assignments.into_par_iter().enumerate().map(job).collect());
    let outcome = SweepOutcome {
        axes: axes.iter().map(|a| a.path.clone()).collect(),
        cells,
    };
    write_tables(out, &outcome)?;
    Ok(outcome)
}

fn cell_config(base: &ExperimentConfig, assignment: &[(String, Value)]) -> LabResult<ExperimentConfig> {
    assignment
        .iter()
        .try_fold(base.clone(), |cfg, (path, value)| cfg.with_field(path, value.clone()))
}

const TABLE_COLUMNS: [&str; 8] = [
    "energy_drift",
    "C_gronwall",
    "C_morawetz",
    "C_lemma32_max",
    "hyp_monotonicity_violation",
    "virial_residual",
    "convergence_slope",
    "virial_order",
];

/// Observed order of the virial residual between neighbouring cells that
/// differ only in `grid.n`.
fn virial_orders(outcome: &SweepOutcome) -> Vec<Option<f64>> {
    let n_axis = outcome.axes.iter().position(|a| a == "grid.n");
    outcome
        .cells
        .iter()
        .enumerate()
        .map(|(k, cell)| {
            let axis = n_axis?;
            let prev = outcome.cells[..k].iter().rev().find(|c| {
                c.assignment
                    .iter()
                    .enumerate()
                    .all(|(i, (_, v))| i == axis || *v == cell.assignment[i].1)
            })?;
            let (a, b) = (&prev.summary, &cell.summary);
            let ra = *a.measured.get("virial_residual")?;
            let rb = *b.measured.get("virial_residual")?;
            let ha = a.config.grid.r_max / (a.config.grid.n + 1) as f64;
            let hb = b.config.grid.r_max / (b.config.grid.n + 1) as f64;
            (ra > 0.0 && rb > 0.0 && ha != hb).then(|| (ra / rb).ln() / (ha / hb).ln())
        })
        .collect()
}

fn write_tables(out: &Path, outcome: &SweepOutcome) -> LabResult<()> {
    let path = out.join(SWEEP_TABLE);
    let mut w = csv::Writer::from_path(&path).map_err(LabError::csv(&path))?;
    let mut header: Vec<String> = vec!["cell".into()];
    header.extend(outcome.axes.iter().cloned());
    header.push("passed".into());
    header.extend(TABLE_COLUMNS.iter().map(|c| c.to_string()));
    w.write_record(&header).map_err(LabError::csv(&path))?;
    let orders = virial_orders(outcome);
    for (cell, order) in outcome.cells.iter().zip(orders) {
        let s = &cell.summary;
        let mut row = vec![cell.index.to_string()];
        row.extend(cell.assignment.iter().map(|(_, v)| match v {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        }));
        row.push(s.passed().to_string());
        let c = &s.constants;
        let cells = [
            c.energy_drift,
            c.C_gronwall,
            c.C_morawetz,
            c.C_lemma32_max,
            c.hyp_monotonicity_violation,
            s.measured.get("virial_residual").copied(),
            s.measured.get("convergence_slope").copied(),
            order,
        ];
        row.extend(cells.iter().map(|v| v.map(io::fmt_f64).unwrap_or_default()));
        w.write_record(&row).map_err(LabError::csv(&path))?;
    }
    w.flush().map_err(LabError::io(&path))?;
    io::write_json(&out.join(SWEEP_JSON), outcome)
}
