//! Leapfrog integration of the flat radial equation, its free counterpart,
//! and the hyperbolic-coordinate equation.
//!
//! Every integrator is the drift–kick–drift form of Störmer–Verlet on
//! `φ = r·u`:
//!
//! ```text
//! φ ← φ + (dt/2) φ_t
//! φ_t ← φ_t + dt F(φ)
//! φ ← φ + (dt/2) φ_t
//! ```
//!
//! with `∂_rr` applied exactly on the sine modes. The scheme is symplectic,
//! time-reversible and second order. Stability of the spectral leapfrog
//! requires `dt · ρ_max < 2`, i.e. `dt < (2/π) h`.

mod flat;
mod hyperbolic;

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::FRAC_2_PI;

use crate::error::{Error, Result};
use crate::radial::{RadialGrid, WaveState};

pub(crate) use flat::check_light_cone;
pub use flat::{evolve, free_wave_exact, step_full};
pub use hyperbolic::{
    evolve_hyperbolic, hyperbolic_transform, log_s_over_sinh, step_hyperbolic, HyperbolicState,
};

/// Default Courant number `dt/h`.
pub const DEFAULT_CFL: f64 = 0.5;

/// Whether the power nonlinearity takes part in the evolution.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Nonlinearity {
    /// `u_tt − Δu + |u|^{p−1}u = 0`.
    Defocusing,
    /// The free wave equation; `p` is carried along but unused.
    Off,
}

/// Time-stepping parameters shared by all integrators.
///
/// `t_end` is an absolute time (or `τ` for the hyperbolic flow). The step
/// actually taken is `dt` shrunk just enough that an integer number of
/// steps lands on `t_end`.
#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub p: f64,
    pub dt: f64,
    pub t_end: f64,
    pub cfl: f64,
    /// Observers fire every `record_every` steps (and on the last step).
    pub record_every: usize,
    /// Every `keep_every`-th recorded state is stored in the trajectory;
    /// 0 keeps only the endpoints.
    pub keep_every: usize,
    pub nonlinearity: Nonlinearity,
}

impl SolverConfig {
    pub fn new(p: f64, dt: f64, t_end: f64) -> Self {
        SolverConfig {
            p,
            dt,
            t_end,
            cfl: DEFAULT_CFL,
            record_every: 1,
            keep_every: 1,
            nonlinearity: Nonlinearity::Defocusing,
        }
    }

    pub fn free(mut self) -> Self {
        self.nonlinearity = Nonlinearity::Off;
        self
    }

    pub fn with_cfl(mut self, cfl: f64) -> Self {
        self.cfl = cfl;
        self
    }

    pub fn with_record_every(mut self, every: usize) -> Self {
        self.record_every = every;
        self
    }

    pub fn with_keep_every(mut self, every: usize) -> Self {
        self.keep_every = every;
        self
    }

    pub fn is_nonlinear(&self) -> bool {
        self.nonlinearity == Nonlinearity::Defocusing
    }

    /// Checks everything that does not depend on the data: the exponent
    /// range (`3 < p ≤ 5`, or `3 ≤ p ≤ 5` when `allow_cubic`), the CFL
    /// condition `dt ≤ cfl·h` with `cfl < 2/π`, and the recording cadence.
    pub(crate) fn validate(&self, grid: &RadialGrid, allow_cubic: bool) -> Result<()> {
        let p_ok = if allow_cubic {
            (3.0..=5.0).contains(&self.p)
        } else {
            self.p > 3.0 && self.p <= 5.0
        };
        if self.is_nonlinear() && !p_ok {
            return Err(Error::invalid("p", format!("exponent {} outside the supported range", self.p)));
        }
        if !(self.cfl > 0.0 && self.cfl < FRAC_2_PI) {
            return Err(Error::invalid(
                "cfl",
                format!("need 0 < cfl < 2/π for spectral leapfrog stability, got {}", self.cfl),
            ));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::invalid("dt", "must be positive"));
        }
        let limit = self.cfl * grid.spacing();
        if self.dt > limit * (1.0 + 1e-12) {
            return Err(Error::invalid(
                "dt",
                format!("dt = {:.6e} violates the CFL bound {:.6e}", self.dt, limit),
            ));
        }
        if !self.t_end.is_finite() {
            return Err(Error::invalid("t_end", "must be finite"));
        }
        if self.record_every == 0 {
            return Err(Error::invalid("record_every", "must be at least 1"));
        }
        Ok(())
    }

    /// Step count and uniform step reaching `t_end` from `start`.
    pub(crate) fn schedule(&self, start: f64) -> Result<(usize, f64)> {
        let span = self.t_end - start;
        if span < 0.0 {
            return Err(Error::invalid(
                "t_end",
                format!("t_end = {} precedes the state time {start}", self.t_end),
            ));
        }
        if span == 0.0 {
            return Ok((0, self.dt));
        }
        let steps = (span / self.dt - 1e-9).ceil().max(1.0) as usize;
        Ok((steps, span / steps as f64))
    }
}

/// States carrying their own clock.
pub trait Timed {
    fn time(&self) -> f64;
}

impl Timed for WaveState {
    fn time(&self) -> f64 {
        self.time
    }
}

/// Callback fired on recorded states during an evolution.
pub trait Observer<S> {
    fn observe(&mut self, state: &S);
}

impl<S, F: FnMut(&S)> Observer<S> for F {
    fn observe(&mut self, state: &S) {
        self(state)
    }
}

/// States kept during an evolution, in increasing time order. The first
/// and last states are always present.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory<S> {
    states: Vec<S>,
}

impl<S: Timed> Trajectory<S> {
    /// Trajectory from externally produced states; times must increase.
    pub fn from_states(states: Vec<S>) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::invalid("states", "trajectory needs at least one state"));
        }
        if states.windows(2).any(|w| !(w[1].time() > w[0].time())) {
            return Err(Error::invalid("states", "times must be strictly increasing"));
        }
        Ok(Trajectory { states })
    }

    pub fn states(&self) -> &[S] {
        &self.states
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.states.iter().map(Timed::time)
    }

    pub fn initial(&self) -> &S {
        &self.states[0]
    }

    pub fn last(&self) -> &S {
        self.states.last().expect("trajectory is never empty")
    }

    pub fn into_last(mut self) -> S {
        self.states.pop().expect("trajectory is never empty")
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// Shared driver: advances `init` with `step(state, t_next, dt)` on the
/// schedule of `cfg`, feeding observers and filling the trajectory.
pub(crate) fn drive<S: Clone + Timed>(
    init: &S,
    cfg: &SolverConfig,
    observers: &mut [&mut dyn Observer<S>],
    mut step: impl FnMut(&S, f64, f64) -> Result<S>,
) -> Result<Trajectory<S>> {
    let start = init.time();
    let (steps, dt) = cfg.schedule(start)?;
    let notify = |observers: &mut [&mut dyn Observer<S>], s: &S| {
        for obs in observers.iter_mut() {
            obs.observe(s);
        }
    };
    notify(observers, init);
    let mut kept = alloc::vec![init.clone()];
    let mut current = init.clone();
    let mut recorded = 0usize;
    for k in 1..=steps {
        let t_next = start + k as f64 * dt;
        current = step(&current, t_next, dt)?;
        let last = k == steps;
        if k % cfg.record_every == 0 || last {
            notify(observers, &current);
            recorded += 1;
            let keep = cfg.keep_every != 0 && recorded % cfg.keep_every == 0;
            if keep || last {
                kept.push(current.clone());
            }
        }
    }
    Ok(Trajectory { states: kept })
}

/// One drift–kick–drift step in place. `force` receives the drifted
/// displacement and returns the acceleration.
pub(crate) fn leapfrog(
    phi: &mut [f64],
    phit: &mut [f64],
    dt: f64,
    force: impl FnOnce(&[f64]) -> Vec<f64>,
) {
    let half = 0.5 * dt;
    for (x, v) in phi.iter_mut().zip(phit.iter()) {
        *x += half * v;
    }
    let acc = force(phi);
    for (v, a) in phit.iter_mut().zip(&acc) {
        *v += dt * a;
    }
    for (x, v) in phi.iter_mut().zip(phit.iter()) {
        *x += half * v;
    }
}

/// `∂_rr φ` on the interior points through the cached sine plan.
pub(crate) fn spectral_laplacian(grid: &RadialGrid, phi: &[f64]) -> Vec<f64> {
    let plan = grid.plan();
    let mut c = plan.analysis(phi);
    for (m, v) in c.iter_mut().enumerate() {
        let rho = grid.frequency(m);
        *v *= -rho * rho;
    }
    plan.sine_synthesis(&c)
}

pub(crate) fn all_finite(xs: &[f64]) -> bool {
    xs.iter().all(|x| x.is_finite())
}

/// `|u|^{p−1} u`.
#[inline]
pub(crate) fn power(u: f64, p: f64) -> f64 {
    u.abs().powf(p - 1.0) * u
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_lands_on_t_end() {
        let cfg = SolverConfig::new(4.0, 0.3, 1.0);
        let (steps, dt) = cfg.schedule(0.0).unwrap();
        assert_eq!(steps, 4);
        assert!((dt * steps as f64 - 1.0).abs() < 1e-15);
        assert_eq!(cfg.schedule(1.0).unwrap().0, 0);
        assert!(cfg.schedule(2.0).is_err());
        let exact = SolverConfig::new(4.0, 0.25, 1.0);
        assert_eq!(exact.schedule(0.0).unwrap(), (4, 0.25));
    }

    #[test]
    fn validation_rejects_bad_parameters() {
        let g = RadialGrid::new(10.0, 99).unwrap();
        let h = g.spacing();
        assert!(SolverConfig::new(4.0, 0.5 * h, 1.0).validate(&g, false).is_ok());
        let err = SolverConfig::new(4.0, 1.01 * h, 1.0).validate(&g, false).unwrap_err();
        assert!(matches!(err, Error::InvalidArgument { field: "dt", .. }));
        let err = SolverConfig::new(2.0, 0.5 * h, 1.0).validate(&g, false).unwrap_err();
        assert!(matches!(err, Error::InvalidArgument { field: "p", .. }));
        assert!(SolverConfig::new(3.0, 0.5 * h, 1.0).validate(&g, false).is_err());
        assert!(SolverConfig::new(3.0, 0.5 * h, 1.0).validate(&g, true).is_ok());
        assert!(SolverConfig::new(2.0, 0.5 * h, 1.0).free().validate(&g, false).is_ok());
        let err = SolverConfig::new(4.0, 0.5 * h, 1.0).with_cfl(0.7).validate(&g, false).unwrap_err();
        assert!(matches!(err, Error::InvalidArgument { field: "cfl", .. }));
        let err = SolverConfig::new(4.0, 0.5 * h, 1.0)
            .with_record_every(0)
            .validate(&g, false)
            .unwrap_err();
        assert!(matches!(err, Error::InvalidArgument { field: "record_every", .. }));
    }
}
