//! Fourier-truncation split `u = v + w` and its coupled evolution.
//!
//! After rescaling so that the high-frequency part `w = P_{>1}u` is small in
//! the critical space, the two pieces evolve by
//!
//! ```text
//! w_tt − Δw + |w|^{p−1}w = 0
//! v_tt − Δv + |v + w|^{p−1}(v + w) − |w|^{p−1}w = 0
//! ```
//!
//! whose sum is the full equation for `u`.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::radial::{RadialField, RadialGrid, WaveState};
use crate::solver::{
    all_finite, check_light_cone, drive, power, spectral_laplacian, Observer, SolverConfig, Timed,
    Trajectory,
};
use crate::spectral::{critical_exponent, lp_project, rescale, sobolev_norm, Band};

/// Dyadic level of the frequency cut: `v = P_{≤2^CUT_LEVEL} u`.
pub const CUT_LEVEL: i32 = 0;

/// Coupled pair `(v, w)` sharing one clock.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitState {
    pub v: WaveState,
    pub w: WaveState,
    /// Scaling applied to the original data before the cut.
    pub lambda: f64,
    pub epsilon: f64,
    pub cut_level: i32,
}

impl SplitState {
    pub fn time(&self) -> f64 {
        self.v.time
    }

    pub fn grid(&self) -> &RadialGrid {
        self.v.grid()
    }

    /// `u = v + w`.
    pub fn combined(&self) -> WaveState {
        WaveState {
            time: self.v.time,
            u: self.v.u.add(&self.w.u).expect("split pieces share a grid"),
            ut: self.v.ut.add(&self.w.ut).expect("split pieces share a grid"),
        }
    }
}

impl Timed for SplitState {
    fn time(&self) -> f64 {
        self.v.time
    }
}

/// Norms recorded in a split certificate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SplitNorms {
    /// `‖w_0‖_{Ḣ^{s_c}}`
    pub w0_hsc: f64,
    /// `‖w_1‖_{Ḣ^{s_c−1}}`
    pub w1_hscm1: f64,
    /// `‖v_0‖_{Ḣ^1}`
    pub v0_h1: f64,
    /// `‖v_1‖_{L²}`
    pub v1_l2: f64,
}

impl SplitNorms {
    /// The quantity that must stay below `ε`.
    pub fn smallness(&self) -> f64 {
        self.w0_hsc + self.w1_hscm1
    }
}

/// `‖w‖_{Ḣ^{s_c}} + ‖w_t‖_{Ḣ^{s_c−1}}`.
pub fn critical_size(w: &WaveState, p: f64) -> Result<f64> {
    let sc = critical_exponent(p)?;
    Ok(sobolev_norm(&w.u, sc)? + sobolev_norm(&w.ut, sc - 1.0)?)
}

/// Measures the certificate norms of `ss` directly.
pub fn split_norms(ss: &SplitState, p: f64) -> Result<SplitNorms> {
    let sc = critical_exponent(p)?;
    Ok(SplitNorms {
        w0_hsc: sobolev_norm(&ss.w.u, sc)?,
        w1_hscm1: sobolev_norm(&ss.w.ut, sc - 1.0)?,
        v0_h1: sobolev_norm(&ss.v.u, 1.0)?,
        v1_l2: sobolev_norm(&ss.v.ut, 0.0)?,
    })
}

/// `v = P_{≤2^j} u`, `w = u − v`, so `v + w = u` up to one rounding.
fn cut(state: &WaveState, j: i32) -> (WaveState, WaveState) {
    let v_u = lp_project(&state.u, j, Band::Leq);
    let v_ut = lp_project(&state.ut, j, Band::Leq);
    let w_u = state.u.sub(&v_u).expect("same grid");
    let w_ut = state.ut.sub(&v_ut).expect("same grid");
    let piece = |u, ut| WaveState {
        time: state.time,
        u,
        ut,
    };
    (piece(v_u, v_ut), piece(w_u, w_ut))
}

/// Splits `state` after the least dyadic rescaling `λ = 2^m ≤ 1` that makes
/// `‖P_{>1}u_0‖_{Ḣ^{s_c}} + ‖P_{>1}u_1‖_{Ḣ^{s_c−1}} < ε`.
///
/// Smallness improves monotonically as `λ` decreases, so the admissible
/// exponents form a half-line and `m` is found by bisection between the
/// lowest exponent the domain can hold and `0`. The returned split is
/// re-measured rather than trusted.
pub fn split_initial(state: &WaveState, p: f64, epsilon: f64) -> Result<SplitState> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::invalid("epsilon", format!("must be positive, got {epsilon}")));
    }
    critical_exponent(p)?;
    let attempt = |m: i32| -> Result<Option<SplitState>> {
        let lambda = 2.0f64.powi(m);
        let scaled = match rescale(state, lambda, p) {
            Ok(s) => s,
            Err(Error::Resolution(_)) => return Ok(None),
            Err(e) => return Err(e),
        };
        let (v, w) = cut(&scaled, CUT_LEVEL);
        let ss = SplitState {
            v,
            w,
            lambda,
            epsilon,
            cut_level: CUT_LEVEL,
        };
        let small = split_norms(&ss, p)?.smallness() < epsilon;
        Ok(small.then_some(ss))
    };
    if let Some(ss) = attempt(0)? {
        return Ok(ss);
    }
    let support = state.support_radius();
    let r_max = state.grid().r_max();
    // lowest m with support · 2^{−m} < r_max
    let m_min = (support / r_max).log2().floor() as i32 + 1;
    let Some(mut best) = attempt(m_min.min(-1))? else {
        return Err(Error::Resolution(format!(
            "no dyadic rescaling down to λ = 2^{m_min} reaches ε = {epsilon} inside r_max = {r_max}"
        )));
    };
    let (mut lo, mut hi) = (m_min.min(-1), 0);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        match attempt(mid)? {
            Some(ss) => {
                best = ss;
                lo = mid;
            }
            None => hi = mid,
        }
    }
    let measured = split_norms(&best, p)?.smallness();
    if !(measured < epsilon) {
        return Err(Error::Numeric(format!(
            "split certificate failed on re-measurement: {measured:.3e} ≥ {epsilon}"
        )));
    }
    Ok(best)
}

fn nonlinear_terms(grid: &RadialGrid, v: &[f64], w: &[f64], p: f64) -> (Vec<f64>, Vec<f64>) {
    // r·|w|^{p−1}w and r·(|u|^{p−1}u − |w|^{p−1}w) in φ-form
    let mut fw = Vec::with_capacity(v.len());
    let mut fv = Vec::with_capacity(v.len());
    for (k, (&a, &b)) in v.iter().zip(w).enumerate() {
        let r = grid.r(k);
        let nw = power(b / r, p);
        fw.push(r * nw);
        fv.push(r * (power((a + b) / r, p) - nw));
    }
    (fv, fw)
}

fn advance(ss: &SplitState, cfg: &SolverConfig, t_next: f64, dt: f64) -> Result<SplitState> {
    let grid = ss.grid();
    let half = 0.5 * dt;
    let mut v = ss.v.u.phi().to_vec();
    let mut vt = ss.v.ut.phi().to_vec();
    let mut w = ss.w.u.phi().to_vec();
    let mut wt = ss.w.ut.phi().to_vec();
    for (x, y) in v.iter_mut().zip(&vt) {
        *x += half * y;
    }
    for (x, y) in w.iter_mut().zip(&wt) {
        *x += half * y;
    }
    let mut acc_v = spectral_laplacian(grid, &v);
    let mut acc_w = spectral_laplacian(grid, &w);
    if cfg.is_nonlinear() {
        let (fv, fw) = nonlinear_terms(grid, &v, &w, cfg.p);
        for (a, f) in acc_v.iter_mut().zip(&fv) {
            *a -= f;
        }
        for (a, f) in acc_w.iter_mut().zip(&fw) {
            *a -= f;
        }
    }
    for (x, a) in vt.iter_mut().zip(&acc_v) {
        *x += dt * a;
    }
    for (x, a) in wt.iter_mut().zip(&acc_w) {
        *x += dt * a;
    }
    for (x, y) in v.iter_mut().zip(&vt) {
        *x += half * y;
    }
    for (x, y) in w.iter_mut().zip(&wt) {
        *x += half * y;
    }
    if ![&v, &vt, &w, &wt].iter().all(|x| all_finite(x)) {
        return Err(Error::BlowUpDetected { time: t_next });
    }
    let state = |u, ut| WaveState {
        time: t_next,
        u: RadialField::from_phi_unchecked(grid, u),
        ut: RadialField::from_phi_unchecked(grid, ut),
    };
    Ok(SplitState {
        v: state(v, vt),
        w: state(w, wt),
        ..ss.clone()
    })
}

/// One coupled leapfrog step: both pieces drift and kick together, with
/// the `v` source evaluated on the same drifted `u = v + w`.
pub fn step_coupled(ss: &SplitState, cfg: &SolverConfig) -> Result<SplitState> {
    cfg.validate(ss.grid(), false)?;
    advance(ss, cfg, ss.time() + cfg.dt, cfg.dt)
}

/// Coupled evolution to `cfg.t_end`.
pub fn evolve_coupled(
    ss: &SplitState,
    cfg: &SolverConfig,
    observers: &mut [&mut dyn Observer<SplitState>],
) -> Result<Trajectory<SplitState>> {
    cfg.validate(ss.grid(), false)?;
    check_light_cone(&ss.combined(), cfg.t_end)?;
    drive(ss, cfg, observers, |s, t_next, dt| advance(s, cfg, t_next, dt))
}

/// `|v + w|^{p−1}(v + w) − |v|^{p−1}v − |w|^{p−1}w`.
pub fn cross_term(v: f64, w: f64, p: f64) -> f64 {
    power(v + w, p) - power(v, p) - power(w, p)
}

/// Leading Taylor term `p|v|^{p−1}w` of [`cross_term`] for small `w`.
pub fn cross_leading(v: f64, w: f64, p: f64) -> f64 {
    p * v.abs().powf(p - 1.0) * w
}

/// Pointwise leading term `p|v|^{p−1}w` (as a field) and
/// `∫|cross − leading| dx` over R³.
pub fn taylor_cross_terms(v: &RadialField, w: &RadialField, p: f64) -> Result<(RadialField, f64)> {
    if v.grid() != w.grid() {
        return Err(Error::invalid("w", "v and w must share a grid"));
    }
    if !(p.is_finite() && p > 1.0) {
        return Err(Error::invalid("p", format!("need p > 1, got {p}")));
    }
    let grid = v.grid();
    let h = grid.spacing();
    let mut leading = Vec::with_capacity(grid.len());
    let mut remainder = 0.0;
    for (k, (a, b)) in v.u_values().into_iter().zip(w.u_values()).enumerate() {
        let r = grid.r(k);
        let lead = cross_leading(a, b, p);
        leading.push(r * lead);
        remainder += r * r * (cross_term(a, b, p) - lead).abs();
    }
    let remainder = 4.0 * core::f64::consts::PI * h * remainder;
    Ok((RadialField::from_phi(grid, leading)?, remainder))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::Profile;
    use crate::solver::evolve;
    use crate::spectral::dst;

    fn gaussian(grid: &RadialGrid) -> WaveState {
        WaveState::at_rest(Profile::gaussian(1.0).unwrap().sample(grid).unwrap())
    }

    #[test]
    fn cut_is_exactly_additive() {
        let g = RadialGrid::new(20.0, 511).unwrap();
        let st = gaussian(&g);
        let (v, w) = cut(&st, 0);
        for ((a, b), c) in v.u.phi().iter().zip(w.u.phi()).zip(st.u.phi()) {
            // one rounding of the sum
            assert!((a + b - c).abs() <= f64::EPSILON * c.abs().max(a.abs()));
        }
        let top = dst(&st.u).coeff().iter().fold(0.0f64, |m, c| m.max(c.abs()));
        assert!(dst(&v.u).modes().all(|(rho, c)| rho <= 1.0 || c.abs() < 1e-15 * top));
    }

    #[test]
    fn band_limited_data_needs_no_rescaling() {
        let g = RadialGrid::new(20.0, 255).unwrap();
        // lowest sine mode only: frequency π/20 < 1
        let phi = g.radii().map(|r| (core::f64::consts::PI * r / 20.0).sin()).collect();
        let st = WaveState::at_rest(RadialField::from_phi(&g, phi).unwrap());
        let ss = split_initial(&st, 4.0, 1e-9).unwrap();
        assert_eq!(ss.lambda, 1.0);
        assert!(ss.w.u.phi().iter().all(|x| x.abs() < 1e-14));
    }

    #[test]
    fn gaussian_split_meets_the_smallness_bound() {
        let g = RadialGrid::new(64.0, 1023).unwrap();
        let st = gaussian(&g);
        let ss = split_initial(&st, 4.0, 0.1).unwrap();
        let sc = 5.0 / 6.0;
        let measured = sobolev_norm(&ss.w.u, sc).unwrap() + sobolev_norm(&ss.w.ut, sc - 1.0).unwrap();
        assert!(measured < 0.1, "{measured}");
        assert!(ss.lambda <= 1.0);
        // one step less rescaling would not have been enough
        if ss.lambda < 1.0 {
            let coarser = rescale(&st, 2.0 * ss.lambda, 4.0).unwrap();
            let (_, w) = cut(&coarser, 0);
            assert!(critical_size(&w, 4.0).unwrap() >= 0.1);
        }
    }

    #[test]
    fn split_rejects_bad_epsilon_and_tiny_domains() {
        let g = RadialGrid::new(8.0, 255).unwrap();
        let st = gaussian(&g);
        assert!(matches!(
            split_initial(&st, 4.0, 0.0),
            Err(Error::InvalidArgument { field: "epsilon", .. })
        ));
        assert!(matches!(split_initial(&st, 4.0, 1e-6), Err(Error::Resolution(_))));
    }

    #[test]
    fn zero_w_reproduces_the_full_flow() {
        let g = RadialGrid::new(20.0, 255).unwrap();
        let st = gaussian(&g);
        let zero = WaveState::at_rest(RadialField::zeros(&g));
        let ss = SplitState {
            v: st.clone(),
            w: zero,
            lambda: 1.0,
            epsilon: 1.0,
            cut_level: 0,
        };
        let cfg = SolverConfig::new(4.0, 0.5 * g.spacing(), 1.0);
        let coupled = evolve_coupled(&ss, &cfg, &mut []).unwrap().into_last();
        let direct = evolve(&st, &cfg, &mut []).unwrap().into_last();
        assert!(coupled.w.u.is_zero() && coupled.w.ut.is_zero());
        assert_eq!(coupled.v.u, direct.u);
        assert_eq!(coupled.v.ut, direct.ut);
    }

    #[test]
    fn coupled_sum_tracks_direct_solve() {
        let g = RadialGrid::new(20.0, 255).unwrap();
        let st = gaussian(&g);
        let (v, w) = cut(&st, 0);
        let ss = SplitState {
            v,
            w,
            lambda: 1.0,
            epsilon: 1.0,
            cut_level: 0,
        };
        let cfg = SolverConfig::new(4.0, 0.5 * g.spacing(), 2.0);
        let coupled = step_coupled(&ss, &cfg).unwrap().combined();
        let direct = crate::solver::step_full(&st, &cfg).unwrap();
        let diff = coupled.u.sub(&direct.u).unwrap().l2_norm();
        assert!(diff < 1e-14 * direct.u.l2_norm(), "{diff}");
    }

    #[test]
    fn cross_term_scalar_check() {
        let rem = cross_term(1.0, 0.1, 4.0) - cross_leading(1.0, 0.1, 4.0);
        // 1.1⁴ − 1 − 10⁻⁴ − 0.4
        assert!((rem - 0.064).abs() < 1e-12, "{rem}");
        for p in [3.5, 4.0, 4.5, 5.0] {
            let mut worst: f64 = 0.0;
            let samples = (-40..=40).map(|i| i as f64 / 20.0).chain([1e-3, -1e-3, 1e3, -1e3]);
            let samples: Vec<f64> = samples.collect();
            for &v in &samples {
                for &w in &samples {
                    let rem = (cross_term(v, w, p) - cross_leading(v, w, p)).abs();
                    let scale = v.abs().powf(p - 2.0) * w * w + v.abs() * w.abs().powf(p - 1.0);
                    if scale > 0.0 {
                        worst = worst.max(rem / scale);
                    } else {
                        assert!(rem < 1e-12);
                    }
                }
            }
            // scale-invariant ratio, bounded uniformly from tiny to huge pieces
            assert!(worst.is_finite() && worst < p * 2.0f64.powf(p), "p = {p}: {worst}");
        }
    }

    #[test]
    fn quartic_remainder_constant_on_a_box() {
        let mut worst: f64 = 0.0;
        for i in -40..=40 {
            for j in -40..=40 {
                let (v, w) = (i as f64 / 20.0, j as f64 / 20.0);
                let rem = (cross_term(v, w, 4.0) - cross_leading(v, w, 4.0)).abs();
                let scale = v * v * w * w + v.abs() * w.abs().powi(3);
                assert!(rem <= 10.0 * scale + 1e-12, "({v}, {w})");
                if scale > 0.0 {
                    worst = worst.max(rem / scale);
                }
            }
        }
        // the w → 0 limit of the ratio is p(p−1)/2 = 6
        assert!((worst - 6.0).abs() < 0.1, "{worst}");
    }

    #[test]
    fn taylor_terms_vanish_when_either_piece_does() {
        let g = RadialGrid::new(10.0, 127).unwrap();
        let f = Profile::gaussian(1.0).unwrap().sample(&g).unwrap();
        let zero = RadialField::zeros(&g);
        let (lead, rem) = taylor_cross_terms(&f, &zero, 4.0).unwrap();
        assert!(lead.is_zero());
        assert_eq!(rem, 0.0);
        let (lead, rem) = taylor_cross_terms(&zero, &f, 4.0).unwrap();
        assert!(lead.is_zero());
        assert_eq!(rem, 0.0);
    }
}
