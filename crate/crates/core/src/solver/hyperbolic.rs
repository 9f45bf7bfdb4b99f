//! The equation in hyperbolic coordinates `t = e^τ cosh s`, `r = e^τ sinh s`.
//!
//! With `ũ(τ, s) = (e^τ sinh s / s)·u(t, r)` and `ψ̃ = s·ũ`, a solution of
//! the flat equation satisfies
//!
//! ```text
//! ψ̃_ττ = ψ̃_ss − s·W(τ, s)·|ũ|^{p−1} ũ,    W = e^{−(p−3)τ} (s / sinh s)^{p−1}
//! ```
//!
//! on `s ∈ (0, s_max)` with Dirichlet ends. `W` is formed in log space so it
//! underflows to zero instead of producing `0·∞` at large `s`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::LN_2;

use super::{all_finite, drive, leapfrog, power, spectral_laplacian, Observer, SolverConfig, Timed, Trajectory};
use crate::error::{Error, Result};
use crate::radial::{Profile, RadialField, RadialGrid, WaveState, SUPPORT_TOL};
use crate::spectral::{dst, radial_derivative};

/// `ψ̃ = s·ũ` and `∂_τ ψ̃` on a grid in `s` at hyperbolic time `τ`.
#[derive(Clone, Debug, PartialEq)]
pub struct HyperbolicState {
    pub tau: f64,
    pub u_tilde: RadialField,
    pub ut_tilde: RadialField,
}

impl HyperbolicState {
    pub fn new(tau: f64, u_tilde: RadialField, ut_tilde: RadialField) -> Result<Self> {
        if u_tilde.grid() != ut_tilde.grid() {
            return Err(Error::invalid("ut_tilde", "u_tilde and ut_tilde must share a grid"));
        }
        if !tau.is_finite() {
            return Err(Error::invalid("tau", "must be finite"));
        }
        Ok(HyperbolicState {
            tau,
            u_tilde,
            ut_tilde,
        })
    }

    /// `ũ(0, s) = amplitude · profile(s)`, `∂_τ ũ = 0`.
    pub fn from_profile(profile: &Profile, amplitude: f64, grid: &RadialGrid) -> Result<Self> {
        let u = profile.sample(grid)?.scaled(amplitude);
        Self::new(0.0, u, RadialField::zeros(grid))
    }

    pub fn grid(&self) -> &RadialGrid {
        self.u_tilde.grid()
    }

    pub fn support_radius(&self) -> f64 {
        self.u_tilde
            .support_radius(SUPPORT_TOL)
            .max(self.ut_tilde.support_radius(SUPPORT_TOL))
    }
}

impl Timed for HyperbolicState {
    fn time(&self) -> f64 {
        self.tau
    }
}

/// `ln(s / sinh s)` for `s ≥ 0`, accurate at both ends.
pub fn log_s_over_sinh(s: f64) -> f64 {
    if s < 1e-4 {
        -s * s / 6.0
    } else if s < 1.0 {
        (s / s.sinh()).ln()
    } else {
        // ln sinh s = s − ln 2 + ln(1 − e^{−2s})
        s.ln() - (s - LN_2 + (-(-2.0 * s).exp()).ln_1p())
    }
}

/// `ln(s/sinh s)` at every grid point; the `τ`-independent part of `ln W`.
pub(crate) fn log_ratio_table(grid: &RadialGrid) -> Vec<f64> {
    grid.radii().map(log_s_over_sinh).collect()
}

fn acceleration(grid: &RadialGrid, log_ratio: &[f64], psi: &[f64], p: f64, tau: f64) -> Vec<f64> {
    let mut acc = spectral_laplacian(grid, psi);
    let decay = -(p - 3.0) * tau;
    for (k, (a, &x)) in acc.iter_mut().zip(psi).enumerate() {
        let s = grid.r(k);
        let w = (decay + (p - 1.0) * log_ratio[k]).exp();
        if w > 0.0 {
            *a -= s * w * power(x / s, p);
        }
    }
    acc
}

fn advance(
    hs: &HyperbolicState,
    cfg: &SolverConfig,
    log_ratio: &[f64],
    tau_next: f64,
    dt: f64,
) -> Result<HyperbolicState> {
    let grid = hs.grid();
    let mut psi = hs.u_tilde.phi().to_vec();
    let mut psit = hs.ut_tilde.phi().to_vec();
    let tau_mid = hs.tau + 0.5 * dt;
    let nonlinear = cfg.is_nonlinear();
    leapfrog(&mut psi, &mut psit, dt, |x| {
        if nonlinear {
            acceleration(grid, log_ratio, x, cfg.p, tau_mid)
        } else {
            spectral_laplacian(grid, x)
        }
    });
    if !(all_finite(&psi) && all_finite(&psit)) {
        return Err(Error::BlowUpDetected { time: tau_next });
    }
    Ok(HyperbolicState {
        tau: tau_next,
        u_tilde: RadialField::from_phi_unchecked(grid, psi),
        ut_tilde: RadialField::from_phi_unchecked(grid, psit),
    })
}

/// One leapfrog step of length `cfg.dt` in `τ`; the coefficient
/// `e^{−(p−3)τ}` is taken at the half step. `p = 3` is admitted.
pub fn step_hyperbolic(hs: &HyperbolicState, cfg: &SolverConfig) -> Result<HyperbolicState> {
    cfg.validate(hs.grid(), true)?;
    let table = log_ratio_table(hs.grid());
    advance(hs, cfg, &table, hs.tau + cfg.dt, cfg.dt)
}

/// Advances to `τ = cfg.t_end`. Propagation speed in `s` is one, so the
/// data support plus the elapsed `τ` must stay below `s_max`.
pub fn evolve_hyperbolic(
    hs: &HyperbolicState,
    cfg: &SolverConfig,
    observers: &mut [&mut dyn Observer<HyperbolicState>],
) -> Result<Trajectory<HyperbolicState>> {
    cfg.validate(hs.grid(), true)?;
    let support = hs.support_radius();
    let reach = support + (cfg.t_end - hs.tau);
    if support > 0.0 && reach >= hs.grid().r_max() {
        return Err(Error::invalid(
            "t_end",
            format!("light cone reaches s = {reach:.3} beyond s_max = {}", hs.grid().r_max()),
        ));
    }
    let table = log_ratio_table(hs.grid());
    drive(hs, cfg, observers, |s, tau_next, dt| advance(s, cfg, &table, tau_next, dt))
}

/// `φ`, `φ_t`, `φ_r` of one recorded state on `r_0 = 0, …, r_{n+1} = r_max`.
struct Samples {
    phi: Vec<f64>,
    phit: Vec<f64>,
    phir: Vec<f64>,
}

impl Samples {
    fn of(state: &WaveState) -> Self {
        let pad = |f: &RadialField| {
            let mut v = vec![0.0];
            v.extend_from_slice(f.phi());
            v.push(0.0);
            v
        };
        Samples {
            phi: pad(&state.u),
            phit: pad(&state.ut),
            phir: radial_derivative(&dst(&state.u)),
        }
    }

    /// Linear interpolation of `(φ, φ_t, φ_r)` at `r`.
    fn at(&self, r: f64, h: f64) -> [f64; 3] {
        let x = r / h;
        let i = (x.floor() as usize).min(self.phi.len() - 2);
        let f = x - i as f64;
        let lerp = |v: &[f64]| (1.0 - f) * v[i] + f * v[i + 1];
        [lerp(&self.phi), lerp(&self.phit), lerp(&self.phir)]
    }
}

/// Samples a recorded flat solution on the hyperboloid of time `τ`:
/// `ψ̃(s) = φ(t, r)` and `∂_τ ψ̃ = t φ_t + r φ_r` at `t = e^τ cosh s`,
/// `r = e^τ sinh s`, bilinear in the recorded `(t, r)` samples.
pub fn hyperbolic_transform(
    traj: &Trajectory<WaveState>,
    tau: f64,
    s_grid: &RadialGrid,
) -> Result<HyperbolicState> {
    let times: Vec<f64> = traj.times().collect();
    let flat = traj.initial().grid();
    let (h, r_max) = (flat.spacing(), flat.r_max());
    let (t_first, t_last) = (times[0], times[times.len() - 1]);
    let scale = tau.exp();
    let mut cache: BTreeMap<usize, Samples> = BTreeMap::new();
    let mut psi = Vec::with_capacity(s_grid.len());
    let mut psit = Vec::with_capacity(s_grid.len());
    for s in s_grid.radii() {
        let t = scale * s.cosh();
        let r = scale * s.sinh();
        if t < t_first || t > t_last || r >= r_max {
            return Err(Error::OutOfDomain(format!(
                "hyperboloid point (t, r) = ({t:.4}, {r:.4}) lies outside the recorded region \
                 t ∈ [{t_first}, {t_last}], r < {r_max}"
            )));
        }
        // bracketing records j, j+1 with times[j] ≤ t ≤ times[j+1]
        let j = match times.partition_point(|&x| x <= t) {
            0 => 0,
            k => (k - 1).min(times.len().saturating_sub(2)),
        };
        let mut value = |idx: usize| -> [f64; 3] {
            cache
                .entry(idx)
                .or_insert_with(|| Samples::of(&traj.states()[idx]))
                .at(r, h)
        };
        let [phi, phit, phir] = if times.len() == 1 {
            value(0)
        } else {
            let w = (t - times[j]) / (times[j + 1] - times[j]);
            let a = value(j);
            let b = value(j + 1);
            [0, 1, 2].map(|c| (1.0 - w) * a[c] + w * b[c])
        };
        psi.push(phi);
        psit.push(t * phit + r * phir);
    }
    HyperbolicState::new(
        tau,
        RadialField::from_phi(s_grid, psi)?,
        RadialField::from_phi(s_grid, psit)?,
    )
}
