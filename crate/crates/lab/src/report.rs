//! Aggregation of run summaries into a pass/fail report.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, LabResult};
use crate::io;
use crate::metrics::agrees;
use crate::run::{recompute, Check, RunSummary, SUMMARY_FILE};

pub const REPORT_TEXT: &str = "report.txt";
pub const REPORT_JSON: &str = "report.json";

/// Values spot-checked per run against their series files.
pub const RECOMPUTED_PER_RUN: usize = 3;
pub const RECOMPUTE_TOL: f64 = 1e-12;

/// One criterion aggregated over all runs that measured it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionRow {
    pub criterion: String,
    pub runs: usize,
    pub passed: usize,
    /// Measured value furthest on the failing side of the threshold.
    pub worst: f64,
    pub threshold: f64,
    pub comparison: crate::run::Comparison,
}

impl CriterionRow {
    pub fn all_passed(&self) -> bool {
        self.passed == self.runs
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FailedRun {
    pub run: String,
    pub reasons: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub runs: usize,
    pub criteria: Vec<CriterionRow>,
    pub failures: Vec<FailedRun>,
    pub all_passed: bool,
}

fn run_label(index: usize, s: &RunSummary) -> String {
    match &s.config.out_dir {
        Some(dir) => dir.display().to_string(),
        None => format!("run {index}"),
    }
}

/// Aggregates `summaries`; errors on an empty list.
pub fn report(summaries: &[RunSummary]) -> LabResult<Report> {
    report_with(summaries, &[])
}

fn report_with(summaries: &[RunSummary], extra: &[Vec<Check>]) -> LabResult<Report> {
    if summaries.is_empty() {
        return Err(LabError::invalid("summaries", "nothing to report"));
    }
    let mut rows: BTreeMap<String, CriterionRow> = BTreeMap::new();
    let mut failures = Vec::new();
    for (k, s) in summaries.iter().enumerate() {
        let own: Vec<&Check> = s.checks.iter().chain(extra.get(k).into_iter().flatten()).collect();
        let mut reasons: Vec<String> = s.error.iter().cloned().collect();
        for c in own {
            let row = rows.entry(c.name.clone()).or_insert_with(|| CriterionRow {
                criterion: c.name.clone(),
                runs: 0,
                passed: 0,
                worst: c.value,
                threshold: c.threshold,
                comparison: c.comparison,
            });
            row.runs += 1;
            row.passed += usize::from(c.passed);
            row.worst = match c.comparison {
                crate::run::Comparison::AtMost => row.worst.max(c.value),
                crate::run::Comparison::AtLeast => row.worst.min(c.value),
            };
            if !c.passed {
                reasons.push(c.describe());
            }
        }
        if !reasons.is_empty() {
            failures.push(FailedRun {
                run: run_label(k, s),
                reasons,
            });
        }
    }
    let criteria: Vec<CriterionRow> = rows.into_values().collect();
    let all_passed = failures.is_empty();
    Ok(Report {
        runs: summaries.len(),
        criteria,
        failures,
        all_passed,
    })
}

impl Report {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let verdict = if self.all_passed { "ALL PASS" } else { "FAILURES" };
        let _ = writeln!(out, "radwave report: {} run(s), {verdict}", self.runs);
        let _ = writeln!(out, "{:<40} {:>9} {:>14} {:>12}  status", "criterion", "passed", "worst", "threshold");
        for r in &self.criteria {
            let op = match r.comparison {
                crate::run::Comparison::AtMost => "<=",
                crate::run::Comparison::AtLeast => ">=",
            };
            let _ = writeln!(
                out,
                "{:<40} {:>4}/{:<4} {:>14.6e} {op} {:>9.3e}  {}",
                r.criterion,
                r.passed,
                r.runs,
                r.worst,
                r.threshold,
                if r.all_passed() { "PASS" } else { "FAIL" }
            );
        }
        for f in &self.failures {
            let _ = writeln!(out, "failed: {}", f.run);
            for reason in &f.reasons {
                let _ = writeln!(out, "  {reason}");
            }
        }
        out
    }
}

/// Every `summary.json` below `dir`, in path order.
pub fn find_summaries(dir: &Path) -> LabResult<Vec<PathBuf>> {
    let mut found = Vec::new();
    let mut pending = vec![dir.to_path_buf()];
    while let Some(d) = pending.pop() {
        let entries = std::fs::read_dir(&d).map_err(LabError::io(&d))?;
        for entry in entries {
            let path = entry.map_err(LabError::io(&d))?.path();
            if path.is_dir() {
                pending.push(path);
            } else if path.file_name().is_some_and(|n| n == SUMMARY_FILE) {
                found.push(path);
            }
        }
    }
    found.sort();
    Ok(found)
}

/// Recomputes up to [`RECOMPUTED_PER_RUN`] values of a run, chosen by a
/// generator seeded with the run's seed, from the files next to its summary.
pub fn spot_check(dir: &Path, s: &RunSummary) -> Vec<Check> {
    let values = s.values();
    let mut rng = ChaCha8Rng::seed_from_u64(s.config.seed);
    let picked: Vec<&(String, f64)> = values.choose_multiple(&mut rng, RECOMPUTED_PER_RUN).collect();
    picked
        .into_iter()
        .map(|(name, recorded)| {
            let gap = match recompute(dir, name, s.config.epsilon) {
                Ok(again) if agrees(*recorded, again, RECOMPUTE_TOL) => 0.0,
                Ok(again) => (again - recorded).abs() / recorded.abs().max(1.0),
                Err(_) => f64::INFINITY,
            };
            Check::at_most(&format!("recomputed {name}"), gap, RECOMPUTE_TOL)
        })
        .collect()
}

/// Reports on every run below `dir`, spot-checking each against its files,
/// and writes the text and JSON documents into `dir`.
pub fn report_dir(dir: &Path) -> LabResult<Report> {
    let paths = find_summaries(dir)?;
    if paths.is_empty() {
        return Err(LabError::invalid("in", format!("no {SUMMARY_FILE} under {}", dir.display())));
    }
    let mut summaries = Vec::with_capacity(paths.len());
    let mut extra = Vec::with_capacity(paths.len());
    for path in &paths {
        let s: RunSummary = io::read_json(path)?;
        let run_dir = path.parent().unwrap_or(dir);
        extra.push(spot_check(run_dir, &s));
        summaries.push(s);
    }
    let report = report_with(&summaries, &extra)?;
    std::fs::write(dir.join(REPORT_TEXT), report.to_text()).map_err(LabError::io(dir.join(REPORT_TEXT)))?;
    io::write_json(&dir.join(REPORT_JSON), &report)?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{ExperimentConfig, GridSpec, Mode, ProfileSpec};
    use crate::run::{Constants, RunStatus};

    fn summary(checks: Vec<Check>) -> RunSummary {
        let config = ExperimentConfig::new(
            4.0,
            ProfileSpec::Gaussian { a: 1.0 },
            GridSpec { r_max: 20.0, n: 63 },
            0.0,
            Mode::Full,
        );
        RunSummary {
            config,
            status: RunStatus::Completed,
            error: None,
            constants: Constants::default(),
            measured: BTreeMap::new(),
            checks,
            files: Vec::new(),
            wall_time_s: 0.0,
        }
    }

    #[test]
    fn empty_input_is_rejected() {
        assert!(matches!(report(&[]), Err(LabError::InvalidArgument { .. })));
    }

    #[test]
    fn passing_run_is_all_green() {
        let r = report(&[summary(vec![Check::at_most("energy_drift", 1e-9, 1e-6)])]).unwrap();
        assert!(r.all_passed);
        assert!(r.to_text().contains("ALL PASS"));
    }

    #[test]
    fn failures_carry_reasons_and_counts_aggregate() {
        let ok = summary(vec![Check::at_most("energy_drift", 1e-9, 1e-6)]);
        let bad = summary(vec![Check::at_most("energy_drift", 1e-3, 1e-6)]);
        let mut crashed = summary(Vec::new());
        crashed.status = RunStatus::Failed;
        crashed.error = Some("invalid argument `dt_factor`: CFL".into());
        let r = report(&[ok, bad, crashed]).unwrap();
        assert!(!r.all_passed);
        let row = &r.criteria[0];
        assert_eq!((row.runs, row.passed, row.worst), (2, 1, 1e-3));
        assert_eq!(r.failures.len(), 2);
        assert!(r.failures[1].reasons[0].contains("dt_factor"));
    }
}
