//! Measured constants as functions of series data. Run summaries and the
//! report both go through these, so a value recomputed from disk matches
//! the recorded one exactly.

use radwave_core::functionals::{DiagnosticsSeries, HyperbolicSeries};

fn max_abs(values: impl Iterator<Item = f64>) -> f64 {
    values.fold(0.0, |m, x| m.max(x.abs()))
}

/// `max_t |E(t) − E(0)| / E(0)`.
pub fn energy_drift(s: &DiagnosticsSeries) -> f64 {
    s.energy_drift()
}

/// `sup_t E(t)/E(0)`; 1 for a run without energy.
pub fn gronwall_constant(s: &DiagnosticsSeries) -> f64 {
    let e0 = s.rows()[0].energy;
    if e0 == 0.0 {
        return 1.0;
    }
    s.rows().iter().map(|r| r.energy / e0).fold(f64::NEG_INFINITY, f64::max)
}

/// Final Morawetz budget over `E(0)`.
pub fn morawetz_constant(s: &DiagnosticsSeries) -> f64 {
    let e0 = s.rows()[0].energy;
    let budget = s.rows()[s.len() - 1].morawetz_cum;
    if e0 == 0.0 {
        0.0
    } else {
        budget / e0
    }
}

/// `max_t |residual| / max(E(0), |M(0)|)`.
pub fn virial_relative(s: &DiagnosticsSeries) -> f64 {
    let first = &s.rows()[0];
    let scale = first.energy.max(first.morawetz.abs());
    if scale == 0.0 {
        return 0.0;
    }
    max_abs(s.rows().iter().map(|r| r.virial_residual)) / scale
}

/// `max_t |𝓔 − E| / E`.
pub fn energy_comparability(s: &DiagnosticsSeries) -> f64 {
    s.rows()
        .iter()
        .filter(|r| r.energy > 0.0)
        .map(|r| (r.script_energy - r.energy).abs() / r.energy)
        .fold(0.0, f64::max)
}

/// `max_t ‖w‖ / ε` for the critical size column.
pub fn smallness_growth(s: &DiagnosticsSeries, epsilon: f64) -> f64 {
    s.rows().iter().map(|r| r.w_hsc).fold(0.0, f64::max) / epsilon
}

/// Exterior over full space-time norm at the final time.
pub fn exterior_fraction(s: &DiagnosticsSeries) -> f64 {
    let last = &s.rows()[s.len() - 1];
    if last.st_norm_cum == 0.0 {
        0.0
    } else {
        last.ext_st_norm_cum / last.st_norm_cum
    }
}

pub fn hyp_monotonicity(s: &HyperbolicSeries) -> f64 {
    s.monotonicity_violation()
}

/// `max_τ |E_hyp(τ) − E_hyp(0)| / E_hyp(0)`.
pub fn hyp_energy_drift(s: &HyperbolicSeries) -> f64 {
    let e0 = s.rows()[0].energy;
    if e0 == 0.0 {
        return 0.0;
    }
    max_abs(s.rows().iter().map(|r| r.energy - e0)) / e0
}

/// `max_τ |residual| / E_hyp(0)`.
pub fn hyp_virial_relative(s: &HyperbolicSeries) -> f64 {
    let e0 = s.rows()[0].energy;
    if e0 == 0.0 {
        return 0.0;
    }
    max_abs(s.rows().iter().map(|r| r.virial_residual)) / e0
}

/// Least-squares slope of `ln err` against `ln h`; `None` unless every
/// error is positive and at least two spacings differ.
pub fn convergence_slope(h: &[f64], err: &[f64]) -> Option<f64> {
    if h.len() < 2 || h.len() != err.len() || err.iter().any(|e| !(*e > 0.0)) {
        return None;
    }
    let x: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let y: Vec<f64> = err.iter().map(|v| v.ln()).collect();
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// `|a − b| ≤ tol · max(1, |a|)`.
pub fn agrees(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(1.0) || (a.is_nan() && b.is_nan())
}
