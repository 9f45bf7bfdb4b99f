//! Append-only diagnostic time series, filled by observers during a run.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use super::{
    energy, energy_parts, hyperbolic_energy, hyperbolic_flux, hyperbolic_morawetz, modified_energy,
    morawetz_integrand, morawetz_potential, spacetime_integrand, virial_coefficient, Region,
    VirialLedger, EXTERIOR_OFFSET,
};
use crate::error::{Error, Result};
use crate::radial::WaveState;
use crate::solver::{HyperbolicState, Nonlinearity, Observer};
use crate::truncation::{critical_size, SplitState};

/// One sample of the flat diagnostics.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DiagnosticRow {
    pub t: f64,
    /// Energy of `u` (full runs) or of `v` (split runs).
    pub energy: f64,
    /// Morawetz potential of `u`.
    pub morawetz: f64,
    /// Modified energy; `E + cM` when there is no `w`.
    pub script_energy: f64,
    /// `u(t,0)²`
    pub u0sq: f64,
    /// `∫₀^t ∫ |u|^{p+1}/|x| dx dt`
    pub morawetz_cum: f64,
    /// `∫₀^t ‖u‖^{2(p−1)}_{L^{2(p−1)}} dt`
    pub st_norm_cum: f64,
    /// Same as `st_norm_cum` over the exterior cone.
    pub ext_st_norm_cum: f64,
    /// Critical size of `w`; zero without a split.
    pub w_hsc: f64,
    pub virial_residual: f64,
}

impl DiagnosticRow {
    pub const HEADER: [&'static str; 10] = [
        "t",
        "E",
        "M",
        "scriptE",
        "u0sq",
        "morawetz_cum",
        "st_norm_cum",
        "ext_st_norm_cum",
        "w_hsc",
        "virial_residual",
    ];

    pub fn to_array(&self) -> [f64; 10] {
        [
            self.t,
            self.energy,
            self.morawetz,
            self.script_energy,
            self.u0sq,
            self.morawetz_cum,
            self.st_norm_cum,
            self.ext_st_norm_cum,
            self.w_hsc,
            self.virial_residual,
        ]
    }

    pub fn from_array(a: [f64; 10]) -> Self {
        DiagnosticRow {
            t: a[0],
            energy: a[1],
            morawetz: a[2],
            script_energy: a[3],
            u0sq: a[4],
            morawetz_cum: a[5],
            st_norm_cum: a[6],
            ext_st_norm_cum: a[7],
            w_hsc: a[8],
            virial_residual: a[9],
        }
    }
}

fn check_times(times: impl Iterator<Item = f64>) -> Result<()> {
    let mut prev = f64::NEG_INFINITY;
    for t in times {
        if !(t > prev) {
            return Err(Error::invalid("t", format!("times must increase strictly, found {t} after {prev}")));
        }
        prev = t;
    }
    Ok(())
}

fn check_monotone(name: &'static str, values: impl Iterator<Item = f64>) -> Result<()> {
    let mut prev = f64::NEG_INFINITY;
    for v in values {
        if !(v >= prev) {
            return Err(Error::invalid(name, "cumulative column decreases"));
        }
        prev = v;
    }
    Ok(())
}

/// Flat diagnostics in time order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DiagnosticsSeries {
    rows: Vec<DiagnosticRow>,
}

impl DiagnosticsSeries {
    /// Rebuilds a series, checking time order and that the cumulative
    /// columns never decrease.
    pub fn from_rows(rows: Vec<DiagnosticRow>) -> Result<Self> {
        check_times(rows.iter().map(|r| r.t))?;
        check_monotone("morawetz_cum", rows.iter().map(|r| r.morawetz_cum))?;
        check_monotone("st_norm_cum", rows.iter().map(|r| r.st_norm_cum))?;
        check_monotone("ext_st_norm_cum", rows.iter().map(|r| r.ext_st_norm_cum))?;
        Ok(DiagnosticsSeries { rows })
    }

    pub fn rows(&self) -> &[DiagnosticRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column(&self, pick: impl Fn(&DiagnosticRow) -> f64) -> Vec<f64> {
        self.rows.iter().map(pick).collect()
    }

    /// `max_t |E(t) − E(0)| / E(0)`, zero for an empty or zero-energy run.
    pub fn energy_drift(&self) -> f64 {
        let Some(first) = self.rows.first() else {
            return 0.0;
        };
        if first.energy == 0.0 {
            return 0.0;
        }
        self.rows
            .iter()
            .map(|r| (r.energy - first.energy).abs() / first.energy)
            .fold(0.0, f64::max)
    }
}

/// Observer building a [`DiagnosticsSeries`] from full or split states.
#[derive(Clone, Debug)]
pub struct DiagnosticsRecorder {
    p: f64,
    nonlinearity: Nonlinearity,
    c_morawetz: f64,
    ledger: VirialLedger,
    last: Option<(f64, f64, f64)>,
    series: DiagnosticsSeries,
    error: Option<Error>,
}

impl DiagnosticsRecorder {
    pub fn new(p: f64, nonlinearity: Nonlinearity, c_morawetz: f64) -> Self {
        DiagnosticsRecorder {
            p,
            nonlinearity,
            c_morawetz,
            ledger: VirialLedger::new(virial_coefficient(p, nonlinearity)),
            last: None,
            series: DiagnosticsSeries::default(),
            error: None,
        }
    }

    pub fn series(&self) -> &DiagnosticsSeries {
        &self.series
    }

    /// The finished series, or the first evaluation error met.
    pub fn finish(self) -> Result<DiagnosticsSeries> {
        match self.error {
            Some(e) => Err(e),
            None => Ok(self.series),
        }
    }

    fn push(&mut self, u: &WaveState, energy: f64, script_energy: f64, w_hsc: f64) {
        let p = self.p;
        let t = u.time;
        let origin = u.u.u_at_origin();
        let u0sq = origin * origin;
        let morawetz = morawetz_potential(u);
        let flux = morawetz_integrand(&u.u, p);
        let st = spacetime_integrand(&u.u, t, p, Region::All);
        let ext = spacetime_integrand(&u.u, t, p, Region::ExteriorCone { offset: EXTERIOR_OFFSET });
        let (virial_residual, flux_cum) = self.ledger.push(t, morawetz, u0sq, flux / (4.0 * PI));
        let (st_cum, ext_cum) = match (self.last, self.series.rows.last()) {
            (Some((t0, st0, ext0)), Some(prev)) => {
                let dt = t - t0;
                (
                    prev.st_norm_cum + 0.5 * dt * (st0 + st),
                    prev.ext_st_norm_cum + 0.5 * dt * (ext0 + ext),
                )
            }
            _ => (0.0, 0.0),
        };
        self.last = Some((t, st, ext));
        self.series.rows.push(DiagnosticRow {
            t,
            energy,
            morawetz,
            script_energy,
            u0sq,
            morawetz_cum: 4.0 * PI * flux_cum,
            st_norm_cum: st_cum,
            ext_st_norm_cum: ext_cum,
            w_hsc,
            virial_residual,
        });
    }

    fn fail(&mut self, e: Error) {
        self.error.get_or_insert(e);
    }
}

impl Observer<WaveState> for DiagnosticsRecorder {
    fn observe(&mut self, state: &WaveState) {
        let parts = match energy_parts(state, self.p) {
            Ok(parts) => parts,
            Err(e) => return self.fail(e),
        };
        let e = match self.nonlinearity {
            Nonlinearity::Defocusing => parts.total(),
            Nonlinearity::Off => parts.linear(),
        };
        let script = e + self.c_morawetz * morawetz_potential(state);
        self.push(state, e, script, 0.0);
    }
}

impl Observer<SplitState> for DiagnosticsRecorder {
    fn observe(&mut self, ss: &SplitState) {
        let sample = (|| {
            Ok::<_, Error>((
                energy(&ss.v, self.p)?,
                modified_energy(ss, self.p, self.c_morawetz)?,
                critical_size(&ss.w, self.p)?,
            ))
        })();
        match sample {
            Ok((e, script, w_hsc)) => self.push(&ss.combined(), e, script, w_hsc),
            Err(e) => self.fail(e),
        }
    }
}

/// One sample of the hyperbolic diagnostics.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct HyperbolicRow {
    pub tau: f64,
    pub energy: f64,
    pub morawetz: f64,
    /// `∫₀^τ ∫ coth(s) W |ũ|^{p+1} s² ds dτ`
    pub morawetz_cum: f64,
    pub virial_residual: f64,
}

impl HyperbolicRow {
    pub const HEADER: [&'static str; 5] = ["tau", "E_hyp", "M_hyp", "hyp_morawetz_cum", "hyp_virial_residual"];

    pub fn to_array(&self) -> [f64; 5] {
        [self.tau, self.energy, self.morawetz, self.morawetz_cum, self.virial_residual]
    }

    pub fn from_array(a: [f64; 5]) -> Self {
        HyperbolicRow {
            tau: a[0],
            energy: a[1],
            morawetz: a[2],
            morawetz_cum: a[3],
            virial_residual: a[4],
        }
    }
}

/// Hyperbolic diagnostics in `τ` order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct HyperbolicSeries {
    rows: Vec<HyperbolicRow>,
}

impl HyperbolicSeries {
    pub fn from_rows(rows: Vec<HyperbolicRow>) -> Result<Self> {
        check_times(rows.iter().map(|r| r.tau))?;
        check_monotone("hyp_morawetz_cum", rows.iter().map(|r| r.morawetz_cum))?;
        Ok(HyperbolicSeries { rows })
    }

    pub fn rows(&self) -> &[HyperbolicRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column(&self, pick: impl Fn(&HyperbolicRow) -> f64) -> Vec<f64> {
        self.rows.iter().map(pick).collect()
    }

    /// Largest single-step increase of `E_hyp`, relative to `E_hyp(0)`.
    pub fn monotonicity_violation(&self) -> f64 {
        let Some(first) = self.rows.first() else {
            return 0.0;
        };
        if first.energy == 0.0 {
            return 0.0;
        }
        self.rows
            .windows(2)
            .map(|w| (w[1].energy - w[0].energy) / first.energy)
            .fold(0.0, f64::max)
    }
}

/// Observer building a [`HyperbolicSeries`].
#[derive(Clone, Debug)]
pub struct HyperbolicRecorder {
    p: f64,
    ledger: VirialLedger,
    series: HyperbolicSeries,
    error: Option<Error>,
}

impl HyperbolicRecorder {
    pub fn new(p: f64, nonlinearity: Nonlinearity) -> Self {
        HyperbolicRecorder {
            p,
            ledger: VirialLedger::new(virial_coefficient(p, nonlinearity)),
            series: HyperbolicSeries::default(),
            error: None,
        }
    }

    pub fn series(&self) -> &HyperbolicSeries {
        &self.series
    }

    pub fn finish(self) -> Result<HyperbolicSeries> {
        match self.error {
            Some(e) => Err(e),
            None => Ok(self.series),
        }
    }
}

impl Observer<HyperbolicState> for HyperbolicRecorder {
    fn observe(&mut self, hs: &HyperbolicState) {
        let sample = hyperbolic_energy(hs, self.p).and_then(|e| Ok((e, hyperbolic_flux(hs, self.p)?)));
        let (energy, flux) = match sample {
            Ok(x) => x,
            Err(e) => {
                self.error.get_or_insert(e);
                return;
            }
        };
        let origin = hs.u_tilde.u_at_origin();
        let morawetz = hyperbolic_morawetz(hs);
        let (virial_residual, morawetz_cum) = self.ledger.push(hs.tau, morawetz, origin * origin, flux);
        self.series.rows.push(HyperbolicRow {
            tau: hs.tau,
            energy,
            morawetz,
            morawetz_cum,
            virial_residual,
        });
    }
}
