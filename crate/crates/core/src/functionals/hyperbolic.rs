//! Functionals of the hyperbolic-coordinate flow, written on `ψ̃ = s ũ`.
//!
//! With `W = e^{−(p−3)τ}(s/sinh s)^{p−1}`:
//!
//! ```text
//! E_hyp = ½∫ψ̃_τ² ds + ½∫ψ̃_s² ds + (1/(p+1)) ∫ W |ũ|^{p+1} s² ds
//! dE_hyp/dτ = −(p−3)/(p+1) ∫ W |ũ|^{p+1} s² ds
//! M_hyp = ∫ ψ̃_τ ψ̃_s ds
//! dM_hyp/dτ = −½ ũ(τ,0)² − (p−1)/(p+1) ∫ coth(s) W |ũ|^{p+1} s² ds
//! ```
//!
//! `∫(∂_s ũ)² s² ds = ∫ψ̃_s² ds` after one integration by parts.

use alloc::vec::Vec;

use super::{check_dense, check_exponent, odd_end_correction, phi_r, virial_coefficient, VirialLedger};
use crate::error::Result;
use crate::solver::{log_s_over_sinh, HyperbolicState, Nonlinearity, Trajectory};
use crate::spectral::dst;

/// `h Σ s² W(s) |ũ|^{p+1} g(s)`.
fn weighted(hs: &HyperbolicState, p: f64, g: impl Fn(f64) -> f64) -> f64 {
    let grid = hs.grid();
    let decay = -(p - 3.0) * hs.tau;
    let sum: f64 = grid
        .radii()
        .zip(hs.u_tilde.u_values())
        .map(|(s, u)| {
            let w = (decay + (p - 1.0) * log_s_over_sinh(s)).exp();
            s * s * w * u.abs().powf(p + 1.0) * g(s)
        })
        .sum();
    grid.spacing() * sum
}

/// Hyperbolic energy at the state's `τ`.
pub fn hyperbolic_energy(hs: &HyperbolicState, p: f64) -> Result<f64> {
    check_exponent(p)?;
    let grid = hs.grid();
    let kinetic = 0.5 * grid.spacing() * hs.ut_tilde.phi().iter().map(|x| x * x).sum::<f64>();
    // ∫ψ̃_s² ds = (s_max/2) Σ ρ² c²
    let gradient = 0.25 * grid.r_max() * dst(&hs.u_tilde).modes().map(|(r, c)| r * r * c * c).sum::<f64>();
    Ok(kinetic + gradient + weighted(hs, p, |_| 1.0) / (p + 1.0))
}

/// `dE_hyp/dτ`, non-positive for `p ≥ 3`.
pub fn hyperbolic_dissipation(hs: &HyperbolicState, p: f64) -> Result<f64> {
    check_exponent(p)?;
    Ok(-(p - 3.0) / (p + 1.0) * weighted(hs, p, |_| 1.0))
}

/// `M_hyp = ∫ ψ̃_τ ψ̃_s ds`.
pub fn hyperbolic_morawetz(hs: &HyperbolicState) -> f64 {
    let h = hs.grid().spacing();
    let sum: f64 = hs.ut_tilde.phi().iter().zip(phi_r(&hs.u_tilde)).map(|(a, b)| a * b).sum();
    h * sum + odd_end_correction(h, hs.ut_tilde.u_at_origin() * hs.u_tilde.u_at_origin())
}

/// `∫ coth(s) W |ũ|^{p+1} s² ds`, the non-negative flux in `dM_hyp/dτ`.
pub fn hyperbolic_flux(hs: &HyperbolicState, p: f64) -> Result<f64> {
    check_exponent(p)?;
    // s² coth s ~ s at the origin, so the integrand is odd there
    let h = hs.grid().spacing();
    let slope = (-(p - 3.0) * hs.tau).exp() * hs.u_tilde.u_at_origin().abs().powf(p + 1.0);
    Ok(weighted(hs, p, |s| 1.0 / s.tanh()) + odd_end_correction(h, slope))
}

/// Residual series of the hyperbolic virial identity along `traj`.
pub fn hyperbolic_virial_residual(
    traj: &Trajectory<HyperbolicState>,
    p: f64,
    nonlinearity: Nonlinearity,
) -> Result<Vec<f64>> {
    check_exponent(p)?;
    check_dense(traj, traj.initial().grid().spacing())?;
    let mut ledger = VirialLedger::new(virial_coefficient(p, nonlinearity));
    traj.states()
        .iter()
        .map(|hs| {
            let origin = hs.u_tilde.u_at_origin();
            let m = hyperbolic_morawetz(hs);
            Ok(ledger.push(hs.tau, m, origin * origin, hyperbolic_flux(hs, p)?).0)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::{Profile, RadialField, RadialGrid};
    use crate::solver::{evolve_hyperbolic, SolverConfig};
    use core::f64::consts::PI;

    fn gaussian(grid: &RadialGrid, amp: f64) -> HyperbolicState {
        HyperbolicState::from_profile(&Profile::gaussian(1.0).unwrap(), amp, grid).unwrap()
    }

    #[test]
    fn zero_state_has_zero_functionals() {
        let g = RadialGrid::new(10.0, 127).unwrap();
        let hs = HyperbolicState::new(0.3, RadialField::zeros(&g), RadialField::zeros(&g)).unwrap();
        assert_eq!(hyperbolic_energy(&hs, 4.0).unwrap(), 0.0);
        assert_eq!(hyperbolic_morawetz(&hs), 0.0);
        assert_eq!(hyperbolic_flux(&hs, 4.0).unwrap(), 0.0);
    }

    #[test]
    fn gradient_term_matches_closed_form() {
        // ũ = e^{−s²}: ∫(∂_s ũ)² s² ds = 4∫s⁴e^{−2s²} ds = 3√(π/2)/8
        let g = RadialGrid::new(12.0, 1023).unwrap();
        let e = hyperbolic_energy(&gaussian(&g, 1.0), 4.0).unwrap();
        let potential = weighted(&gaussian(&g, 1.0), 4.0, |_| 1.0) / 5.0;
        let grad = 0.5 * 3.0 * (PI / 2.0).sqrt() / 8.0;
        assert!((e - potential - grad).abs() < 1e-12, "{}", e - potential);
    }

    #[test]
    fn energy_decay_matches_its_rate() {
        let g = RadialGrid::new(12.0, 1023).unwrap();
        let hs = gaussian(&g, 2.0);
        let dt = 0.25 * g.spacing();
        let cfg = SolverConfig::new(4.0, dt, 0.2);
        let traj = evolve_hyperbolic(&hs, &cfg, &mut []).unwrap();
        let states = traj.states();
        let mut worst: f64 = 0.0;
        for w in states.windows(3) {
            let de = (hyperbolic_energy(&w[2], 4.0).unwrap() - hyperbolic_energy(&w[0], 4.0).unwrap())
                / (w[2].tau - w[0].tau);
            let rate = hyperbolic_dissipation(&w[1], 4.0).unwrap();
            worst = worst.max((de - rate).abs() / rate.abs());
        }
        assert!(worst < 1e-3, "{worst}");
    }

    #[test]
    fn virial_residual_is_small() {
        let g = RadialGrid::new(12.0, 1023).unwrap();
        let hs = gaussian(&g, 2.0);
        let cfg = SolverConfig::new(4.0, 0.25 * g.spacing(), 1.0);
        let traj = evolve_hyperbolic(&hs, &cfg, &mut []).unwrap();
        let res = hyperbolic_virial_residual(&traj, 4.0, Nonlinearity::Defocusing).unwrap();
        let e0 = hyperbolic_energy(&hs, 4.0).unwrap();
        let worst = res.iter().fold(0.0f64, |m, r| m.max(r.abs()));
        assert!(worst < 1e-3 * e0, "{worst}");
    }
}
