//! The flat equation `φ_tt = φ_rr − r|φ/r|^{p−1}(φ/r)` and its free limit.

use alloc::format;
use alloc::vec::Vec;

use super::{all_finite, drive, leapfrog, power, spectral_laplacian, Observer, SolverConfig, Trajectory};
use crate::error::{Error, Result};
use crate::radial::{Profile, RadialField, RadialGrid, WaveState};

/// `F(φ) = φ_rr − r |φ/r|^{p−1} (φ/r)` (or just `φ_rr` when free).
fn acceleration(grid: &RadialGrid, phi: &[f64], cfg: &SolverConfig) -> Vec<f64> {
    let mut acc = spectral_laplacian(grid, phi);
    if cfg.is_nonlinear() {
        for (k, (a, &x)) in acc.iter_mut().zip(phi).enumerate() {
            let r = grid.r(k);
            *a -= r * power(x / r, cfg.p);
        }
    }
    acc
}

fn advance(state: &WaveState, cfg: &SolverConfig, t_next: f64, dt: f64) -> Result<WaveState> {
    let grid = state.grid();
    let mut phi = state.u.phi().to_vec();
    let mut phit = state.ut.phi().to_vec();
    leapfrog(&mut phi, &mut phit, dt, |x| acceleration(grid, x, cfg));
    if !(all_finite(&phi) && all_finite(&phit)) {
        return Err(Error::BlowUpDetected { time: t_next });
    }
    Ok(WaveState {
        time: t_next,
        u: RadialField::from_phi_unchecked(grid, phi),
        ut: RadialField::from_phi_unchecked(grid, phit),
    })
}

/// One leapfrog step of length `cfg.dt`.
pub fn step_full(state: &WaveState, cfg: &SolverConfig) -> Result<WaveState> {
    cfg.validate(state.grid(), false)?;
    advance(state, cfg, state.time + cfg.dt, cfg.dt)
}

/// Requires the light cone of the data to stay inside the domain until
/// `t_end`, so the Dirichlet wall at `r_max` is never felt.
pub(crate) fn check_light_cone(state: &WaveState, t_end: f64) -> Result<()> {
    let reach = state.support_radius() + (t_end - state.time);
    let r_max = state.grid().r_max();
    if state.support_radius() > 0.0 && reach >= r_max {
        return Err(Error::invalid(
            "t_end",
            format!("light cone reaches r = {reach:.3} beyond r_max = {r_max}"),
        ));
    }
    Ok(())
}

/// Advances `state` to `cfg.t_end`, calling the observers on every
/// recorded state (the initial one included).
pub fn evolve(
    state: &WaveState,
    cfg: &SolverConfig,
    observers: &mut [&mut dyn Observer<WaveState>],
) -> Result<Trajectory<WaveState>> {
    cfg.validate(state.grid(), false)?;
    check_light_cone(state, cfg.t_end)?;
    drive(state, cfg, observers, |s, t_next, dt| advance(s, cfg, t_next, dt))
}

/// Exact free evolution of `(u_0, 0)`:
/// `φ(t, r) = [ψ(r + t) + ψ(r − t)]/2` with `ψ(r) = r·u_0(|r|)` odd.
pub fn free_wave_exact(u0: &Profile, t: f64, grid: &RadialGrid) -> Result<RadialField> {
    let profile = u0.validated()?;
    if !t.is_finite() {
        return Err(Error::invalid("t", "must be finite"));
    }
    let phi = grid
        .radii()
        .map(|r| 0.5 * (profile.phi(r + t) + profile.phi(r - t)))
        .collect();
    RadialField::from_phi(grid, phi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::dst;
    use alloc::vec;
    use core::f64::consts::PI;

    fn gaussian_state(grid: &RadialGrid, amp: f64) -> WaveState {
        let u = Profile::gaussian(1.0).unwrap().sample(grid).unwrap().scaled(amp);
        WaveState::at_rest(u)
    }

    fn sum_sq(x: &[f64]) -> f64 {
        x.iter().map(|v| v * v).sum()
    }

    #[test]
    fn zero_state_is_a_fixed_point() {
        let g = RadialGrid::new(10.0, 127).unwrap();
        let st = WaveState::at_rest(RadialField::zeros(&g));
        let cfg = SolverConfig::new(4.0, 0.5 * g.spacing(), 1.0);
        let next = step_full(&st, &cfg).unwrap();
        assert!(next.u.is_zero() && next.ut.is_zero());
    }

    #[test]
    fn cfl_violation_is_rejected() {
        let g = RadialGrid::new(10.0, 127).unwrap();
        let st = gaussian_state(&g, 1.0);
        let cfg = SolverConfig::new(4.0, 1.5 * g.spacing(), 1.0);
        assert!(matches!(
            step_full(&st, &cfg),
            Err(Error::InvalidArgument { field: "dt", .. })
        ));
    }

    #[test]
    fn zero_duration_returns_initial_state() {
        let g = RadialGrid::new(20.0, 255).unwrap();
        let st = gaussian_state(&g, 1.0);
        let mut calls = 0;
        let mut count = |_: &WaveState| calls += 1;
        let traj = evolve(&st, &SolverConfig::new(4.0, 0.01, 0.0), &mut [&mut count]).unwrap();
        assert_eq!(traj.len(), 1);
        assert_eq!(traj.last(), &st);
        assert_eq!(calls, 1);
    }

    #[test]
    fn observers_follow_record_cadence() {
        let g = RadialGrid::new(20.0, 255).unwrap();
        let st = gaussian_state(&g, 1.0);
        let dt = 0.5 * g.spacing();
        let cfg = SolverConfig::new(4.0, dt, 10.0 * dt).with_record_every(3);
        let mut seen = vec![];
        let mut rec = |s: &WaveState| seen.push(s.time);
        let traj = evolve(&st, &cfg, &mut [&mut rec]).unwrap();
        // steps 0, 3, 6, 9 and the final step 10
        assert_eq!(seen.len(), 5);
        assert_eq!(traj.len(), 5);
        assert!((traj.last().time - 10.0 * dt).abs() < 1e-14);
        let sparse = evolve(&st, &cfg.clone().with_keep_every(0), &mut []).unwrap();
        assert_eq!(sparse.len(), 2);
        assert_eq!(sparse.last(), traj.last());
    }

    #[test]
    fn light_cone_must_fit() {
        let g = RadialGrid::new(10.0, 255).unwrap();
        let st = gaussian_state(&g, 1.0);
        let cfg = SolverConfig::new(4.0, 0.5 * g.spacing(), 6.0);
        assert!(matches!(
            evolve(&st, &cfg, &mut []),
            Err(Error::InvalidArgument { field: "t_end", .. })
        ));
    }

    #[test]
    fn exact_free_wave_formula() {
        let g = RadialGrid::new(10.0, 9).unwrap();
        let prof = Profile::gaussian(1.0).unwrap();
        assert_eq!(free_wave_exact(&prof, 0.0, &g).unwrap(), prof.sample(&g).unwrap());
        let f = free_wave_exact(&prof, 3.0, &g).unwrap();
        let expect = (4.0 * (-16.0f64).exp() + (-2.0) * (-4.0f64).exp()) / 2.0;
        assert!((f.phi()[0] - expect).abs() < 1e-16);
    }

    #[test]
    fn exact_free_wave_conserves_energy() {
        // ½∫φ_t² + ½∫φ_r² dr with φ_t, φ_r from the closed form, midpoint rule
        let a = 1.0;
        let psi_d = |x: f64| (1.0 - 2.0 * a * x * x) * (-a * x * x).exp();
        let energy = |t: f64| {
            let n = 200_000;
            let h = 20.0 / n as f64;
            (0..n)
                .map(|k| {
                    let r = (k as f64 + 0.5) * h;
                    let phi_r = 0.5 * (psi_d(r + t) + psi_d(r - t));
                    let phi_t = 0.5 * (psi_d(r + t) - psi_d(r - t));
                    0.5 * (phi_r * phi_r + phi_t * phi_t) * h
                })
                .sum::<f64>()
        };
        let e0 = energy(0.0);
        // gradient energy of e^{-r²}: 3(π/2)^{3/2}/(8π) on the radial line
        assert!((e0 - 3.0 * (PI / 2.0).powf(1.5) / (8.0 * PI)).abs() < 1e-9);
        for &t in &[1.0, 2.5, 5.0] {
            assert!((energy(t) - e0).abs() < 1e-9 * e0);
        }
    }

    #[test]
    fn one_step_conserves_energy_closely() {
        let g = RadialGrid::new(20.0, 4096).unwrap();
        let st = gaussian_state(&g, 1.0);
        let cfg = SolverConfig::new(4.0, 0.5 * g.spacing(), 1.0);
        let next = step_full(&st, &cfg).unwrap();
        // energy with the 1/(p+1) potential, assembled from primitive sums
        let e = |s: &WaveState| {
            let h = g.spacing();
            let c = dst(&s.u);
            let grad: f64 = c.modes().map(|(rho, c)| rho * rho * c * c).sum::<f64>() * g.r_max() / 2.0;
            let pot: f64 = s
                .u
                .u_values()
                .iter()
                .zip(g.radii())
                .map(|(u, r)| r * r * u.abs().powi(5))
                .sum::<f64>()
                * h
                / 5.0;
            4.0 * PI * (0.5 * h * sum_sq(s.ut.phi()) + 0.5 * grad + pot)
        };
        let (e0, e1) = (e(&st), e(&next));
        assert!((e0 - 3.05263).abs() < 1e-4, "{e0}");
        assert!((e1 - e0).abs() < 1e-8 * e0, "{e0} {e1}");
    }
}
