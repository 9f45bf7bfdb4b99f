//! Scalar functionals of radial states and their time series.
//!
//! Volume integrals over R³ carry the radial weight `4πr²` and are
//! evaluated as `4π h Σ r_k² f(r_k)` (trapezoid with vanishing ends).
//! Line integrals that the theory writes in `dr` form, the Morawetz
//! potential and its virial identity, carry no `4π`:
//!
//! ```text
//! M = ∫ u_t u_r r² dr + ∫ u_t u r dr = ∫ φ_t φ_r dr
//! dM/dt = −½ u(t,0)² − (p−1)/(p+1) ∫ |u|^{p+1} r dr
//! ```

mod hyperbolic;
mod series;

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::radial::{RadialField, WaveState};
use crate::solver::{power, Nonlinearity, Trajectory};
use crate::spectral::{dst, radial_derivative};
use crate::truncation::SplitState;

pub use hyperbolic::{
    hyperbolic_dissipation, hyperbolic_energy, hyperbolic_flux, hyperbolic_morawetz,
    hyperbolic_virial_residual,
};
pub use series::{
    DiagnosticRow, DiagnosticsRecorder, DiagnosticsSeries, HyperbolicRecorder, HyperbolicRow,
    HyperbolicSeries,
};

/// Default weight of `M` in the modified energy.
pub const DEFAULT_C_MORAWETZ: f64 = 0.01;

/// Offset of the exterior region used by the diagnostics: `r ≥ t + ½` in
/// simulation time, the cone `|x| ≥ t − ½` for data placed at `t = 1`.
pub const EXTERIOR_OFFSET: f64 = -0.5;

fn check_exponent(p: f64) -> Result<()> {
    if p.is_finite() && p > 1.0 {
        Ok(())
    } else {
        Err(Error::invalid("p", format!("need p > 1, got {p}")))
    }
}

/// `4π h Σ r² g(r, u)` over the grid.
fn volume_integral(u: &RadialField, mut g: impl FnMut(f64, f64) -> f64) -> f64 {
    let grid = u.grid();
    let sum: f64 = grid
        .radii()
        .zip(u.u_values())
        .map(|(r, x)| r * r * g(r, x))
        .sum();
    4.0 * PI * grid.spacing() * sum
}

/// The three terms of the energy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyParts {
    /// `½‖u_t‖²_{L²}`
    pub kinetic: f64,
    /// `½‖∇u‖²_{L²}`
    pub gradient: f64,
    /// `(1/(p+1))‖u‖^{p+1}_{L^{p+1}}`
    pub potential: f64,
}

impl EnergyParts {
    pub fn total(&self) -> f64 {
        self.kinetic + self.gradient + self.potential
    }

    /// Energy of the free wave equation.
    pub fn linear(&self) -> f64 {
        self.kinetic + self.gradient
    }
}

/// Energy split into its parts.
///
/// For Dirichlet `φ = r u`, `∫|∇u|² dx = 4π ∫ φ_r² dr`, which on the sine
/// modes is `4π (r_max/2) Σ ρ_m² c_m²`. The kinetic term uses
/// `4π h Σ φ_t²`, equal to its spectral form by Parseval.
pub fn energy_parts(state: &WaveState, p: f64) -> Result<EnergyParts> {
    check_exponent(p)?;
    let grid = state.grid();
    let kinetic = 0.5 * 4.0 * PI * grid.spacing() * state.ut.phi().iter().map(|x| x * x).sum::<f64>();
    let gradient = 0.5 * dst(&state.u).weighted_energy(|rho| rho * rho);
    let potential = volume_integral(&state.u, |_, x| x.abs().powf(p + 1.0)) / (p + 1.0);
    Ok(EnergyParts {
        kinetic,
        gradient,
        potential,
    })
}

/// `E = ½‖u_t‖² + ½‖∇u‖² + (1/(p+1))‖u‖^{p+1}_{L^{p+1}}`.
pub fn energy(state: &WaveState, p: f64) -> Result<f64> {
    Ok(energy_parts(state, p)?.total())
}

/// `½‖u_t‖² + ½‖∇u‖²`.
pub fn linear_energy(state: &WaveState) -> f64 {
    energy_parts(state, 2.0).expect("fixed exponent").linear()
}

/// `∂_r φ` at the grid points, from the cosine series of the sine modes.
fn phi_r(u: &RadialField) -> Vec<f64> {
    let mut d = radial_derivative(&dst(u));
    // drop the endpoint values r = 0 and r = r_max
    d.pop();
    d.remove(0);
    d
}

/// Euler–Maclaurin end term for a trapezoid sum of an integrand that is
/// odd in `r`, so `f(0) = 0` but `f'(0) ≠ 0`.
pub(crate) fn odd_end_correction(h: f64, slope_at_origin: f64) -> f64 {
    h * h / 12.0 * slope_at_origin
}

/// `M = ∫ φ_t φ_r dr`, no `4π`.
///
/// The integrand is odd with slope `u_t(0) u(0)` at the origin.
pub fn morawetz_potential(state: &WaveState) -> f64 {
    let h = state.grid().spacing();
    let sum: f64 = state.ut.phi().iter().zip(phi_r(&state.u)).map(|(a, b)| a * b).sum();
    h * sum + odd_end_correction(h, state.ut.u_at_origin() * state.u.u_at_origin())
}

/// `∫ |u|^{p+1}/|x| dx = 4π ∫ |u|^{p+1} r dr`, with the odd end term.
pub fn morawetz_integrand(u: &RadialField, p: f64) -> f64 {
    let h = u.grid().spacing();
    let slope = u.u_at_origin().abs().powf(p + 1.0);
    volume_integral(u, |r, x| x.abs().powf(p + 1.0) / r) + 4.0 * PI * odd_end_correction(h, slope)
}

/// Spatial domain of a space-time norm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Region {
    All,
    /// `r ≥ t − offset` at time `t`.
    ExteriorCone { offset: f64 },
}

impl Region {
    fn contains(&self, t: f64, r: f64) -> bool {
        match *self {
            Region::All => true,
            Region::ExteriorCone { offset } => r >= t - offset,
        }
    }
}

/// `∫_region |u|^{2(p−1)} dx` at time `t`.
pub fn spacetime_integrand(u: &RadialField, t: f64, p: f64, region: Region) -> f64 {
    let q = 2.0 * (p - 1.0);
    volume_integral(u, |r, x| if region.contains(t, r) { x.abs().powf(q) } else { 0.0 })
}

/// `𝓔 = E(v) + c M(v) − ∫ |v|^{p−1} v w dx`.
///
/// `c = 0` is admitted so the correction term can be isolated.
pub fn modified_energy(ss: &SplitState, p: f64, c: f64) -> Result<f64> {
    if !(c.is_finite() && c >= 0.0) {
        return Err(Error::invalid("c", format!("must be non-negative, got {c}")));
    }
    let e = energy(&ss.v, p)?;
    let w = ss.w.u.u_values();
    let mut k = 0;
    let coupling = volume_integral(&ss.v.u, |_, v| {
        let term = power(v, p) * w[k];
        k += 1;
        term
    });
    Ok(e + c * morawetz_potential(&ss.v) - coupling)
}

/// Running trapezoid integral of `values` sampled at `times`.
pub fn cumulative_trapezoid(times: &[f64], values: &[f64]) -> Vec<f64> {
    assert_eq!(times.len(), values.len(), "samples and times differ in length");
    let mut acc = 0.0;
    let mut out = Vec::with_capacity(values.len());
    for i in 0..values.len() {
        if i > 0 {
            acc += 0.5 * (times[i] - times[i - 1]) * (values[i] + values[i - 1]);
        }
        out.push(acc);
    }
    out
}

/// Running sums of the virial identity
/// `M(T) − M(0) + ∫₀^T [½ u(t,0)² + k F(t)] dt`, with `F` the flux.
#[derive(Clone, Debug, Default)]
pub(crate) struct VirialLedger {
    coefficient: f64,
    start: Option<f64>,
    last: Option<(f64, f64, f64)>,
    origin_cum: f64,
    flux_cum: f64,
}

impl VirialLedger {
    pub(crate) fn new(coefficient: f64) -> Self {
        VirialLedger {
            coefficient,
            ..Default::default()
        }
    }

    /// Adds a sample; returns the residual and the flux integral so far.
    pub(crate) fn push(&mut self, t: f64, m: f64, origin_sq: f64, flux: f64) -> (f64, f64) {
        let m0 = *self.start.get_or_insert(m);
        if let Some((t0, o0, f0)) = self.last {
            let dt = t - t0;
            self.origin_cum += 0.5 * dt * (o0 + origin_sq);
            self.flux_cum += 0.5 * dt * (f0 + flux);
        }
        self.last = Some((t, origin_sq, flux));
        let residual = m - m0 + 0.5 * self.origin_cum + self.coefficient * self.flux_cum;
        (residual, self.flux_cum)
    }
}

pub(crate) fn virial_coefficient(p: f64, nonlinearity: Nonlinearity) -> f64 {
    match nonlinearity {
        Nonlinearity::Defocusing => (p - 1.0) / (p + 1.0),
        Nonlinearity::Off => 0.0,
    }
}

/// Recording gaps must not exceed the grid spacing, so the time
/// quadrature stays below the scheme error.
pub(crate) fn check_dense<S: crate::solver::Timed>(traj: &Trajectory<S>, spacing: f64) -> Result<()> {
    let times: Vec<f64> = traj.times().collect();
    if let Some(gap) = times.windows(2).map(|w| w[1] - w[0]).reduce(f64::max) {
        if gap > spacing * (1.0 + 1e-9) {
            return Err(Error::invalid(
                "trajectory",
                format!("recording gap {gap:.3e} exceeds the grid spacing {spacing:.3e}"),
            ));
        }
    }
    Ok(())
}

/// Residual series of the flat virial identity along `traj`.
pub fn virial_residual(traj: &Trajectory<WaveState>, p: f64, nonlinearity: Nonlinearity) -> Result<Vec<f64>> {
    check_exponent(p)?;
    check_dense(traj, traj.initial().grid().spacing())?;
    let mut ledger = VirialLedger::new(virial_coefficient(p, nonlinearity));
    Ok(traj
        .states()
        .iter()
        .map(|s| {
            let flux = morawetz_integrand(&s.u, p) / (4.0 * PI);
            let origin = s.u.u_at_origin();
            ledger.push(s.time, morawetz_potential(s), origin * origin, flux).0
        })
        .collect())
}

/// Cumulative `∫₀^T ∫ |u|^{p+1}/|x| dx dt`.
pub fn morawetz_budget(traj: &Trajectory<WaveState>, p: f64) -> Result<Vec<f64>> {
    check_exponent(p)?;
    let times: Vec<f64> = traj.times().collect();
    let values: Vec<f64> = traj.states().iter().map(|s| morawetz_integrand(&s.u, p)).collect();
    Ok(cumulative_trapezoid(&times, &values))
}

/// Cumulative `∫₀^T ∫_region |u|^{2(p−1)} dx dt`.
pub fn spacetime_norm(traj: &Trajectory<WaveState>, p: f64, region: Region) -> Result<Vec<f64>> {
    check_exponent(p)?;
    let times: Vec<f64> = traj.times().collect();
    let values: Vec<f64> = traj
        .states()
        .iter()
        .map(|s| spacetime_integrand(&s.u, s.time, p, region))
        .collect();
    Ok(cumulative_trapezoid(&times, &values))
}
