//! Radial grids, fields and analytic test profiles.
//!
//! A radial function `u(r)` on R³ is stored through `φ(r) = r·u(r)`. The 3D
//! radial Laplacian becomes `∂_rr φ` and `φ` vanishes at `r = 0`, so the
//! interior samples `r_k = k·h`, `k = 1..n`, carry everything and both end
//! points are homogeneous Dirichlet nodes.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use crate::error::{Error, Result};
use crate::spectral::transform::SineTransform;

/// Smallest admissible number of interior points.
pub const MIN_POINTS: usize = 8;

/// Uniform grid `r_k = k·h`, `h = r_max/(n+1)`.
///
/// The grid owns the sine-transform plan for its size so that every field
/// living on it can be transformed without re-planning.
#[derive(Clone)]
pub struct RadialGrid {
    r_max: f64,
    n: usize,
    h: f64,
    plan: Arc<SineTransform>,
}

impl fmt::Debug for RadialGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialGrid")
            .field("r_max", &self.r_max)
            .field("n", &self.n)
            .field("h", &self.h)
            .finish()
    }
}

impl PartialEq for RadialGrid {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.r_max.to_bits() == other.r_max.to_bits()
    }
}

impl RadialGrid {
    pub fn new(r_max: f64, n: usize) -> Result<Self> {
        if !(r_max.is_finite() && r_max > 0.0) {
            return Err(Error::invalid("r_max", format!("must be positive, got {r_max}")));
        }
        if n < MIN_POINTS {
            return Err(Error::invalid(
                "n",
                format!("need at least {MIN_POINTS} interior points, got {n}"),
            ));
        }
        Ok(RadialGrid {
            r_max,
            n,
            h: r_max / (n + 1) as f64,
            plan: Arc::new(SineTransform::new(n)),
        })
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    /// Radius of the `k`-th interior point, zero-based (`r(0) = h`).
    #[inline]
    pub fn r(&self, k: usize) -> f64 {
        (k + 1) as f64 * self.h
    }

    pub fn radii(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |k| self.r(k))
    }

    /// Radial frequency `ρ_m = mπ/r_max` of the `m`-th sine mode, zero-based.
    #[inline]
    pub fn frequency(&self, m: usize) -> f64 {
        (m + 1) as f64 * PI / self.r_max
    }

    /// Largest resolved frequency, `nπ/r_max`.
    pub fn nyquist(&self) -> f64 {
        self.frequency(self.n - 1)
    }

    pub(crate) fn plan(&self) -> &SineTransform {
        &self.plan
    }
}

/// Samples of `φ = r·u` on the interior points of a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialField {
    grid: RadialGrid,
    phi: Vec<f64>,
}

impl RadialField {
    pub fn from_phi(grid: &RadialGrid, phi: Vec<f64>) -> Result<Self> {
        if phi.len() != grid.len() {
            return Err(Error::invalid(
                "phi",
                format!("expected {} samples, got {}", grid.len(), phi.len()),
            ));
        }
        if let Some(k) = phi.iter().position(|v| !v.is_finite()) {
            return Err(Error::Numeric(format!("non-finite sample at r = {}", grid.r(k))));
        }
        Ok(RadialField {
            grid: grid.clone(),
            phi,
        })
    }

    /// Field whose `u` values are given by `u(r)` at the grid points.
    pub fn from_fn(grid: &RadialGrid, u: impl Fn(f64) -> f64) -> Result<Self> {
        let phi = grid.radii().map(|r| r * u(r)).collect();
        Self::from_phi(grid, phi)
    }

    pub fn zeros(grid: &RadialGrid) -> Self {
        RadialField {
            grid: grid.clone(),
            phi: alloc::vec![0.0; grid.len()],
        }
    }

    pub(crate) fn from_phi_unchecked(grid: &RadialGrid, phi: Vec<f64>) -> Self {
        debug_assert_eq!(phi.len(), grid.len());
        RadialField {
            grid: grid.clone(),
            phi,
        }
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    pub fn into_phi(self) -> Vec<f64> {
        self.phi
    }

    /// `u(r_k) = φ(r_k)/r_k` at every grid point.
    pub fn u_values(&self) -> Vec<f64> {
        self.phi
            .iter()
            .enumerate()
            .map(|(k, p)| p / self.grid.r(k))
            .collect()
    }

    /// Quadratic extrapolation of `u = φ/r` to the origin.
    ///
    /// Fits the even polynomial `a + b r²` through `r = h, 2h`, so
    /// `u(0) ≈ (4u(h) − u(2h))/3` with `O(h⁴)` error for smooth radial data.
    pub fn u_at_origin(&self) -> f64 {
        let h = self.grid.spacing();
        (4.0 * self.phi[0] / h - self.phi[1] / (2.0 * h)) / 3.0
    }

    /// `‖u‖_{L²(R³)}` by the trapezoid rule on `4π r² u² dr`.
    pub fn l2_norm(&self) -> f64 {
        (4.0 * PI * self.grid.spacing() * self.phi.iter().map(|p| p * p).sum::<f64>()).sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.phi.iter().all(|&p| p == 0.0)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::from_phi_unchecked(&self.grid, self.phi.iter().map(|p| factor * p).collect())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Self, op: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::invalid("grid", "fields live on different grids"));
        }
        let phi = self
            .phi
            .iter()
            .zip(&other.phi)
            .map(|(&a, &b)| op(a, b))
            .collect();
        Ok(Self::from_phi_unchecked(&self.grid, phi))
    }

    /// Largest grid radius where `|φ|` exceeds `rel_tol · max|φ|`, or zero
    /// for the zero field.
    pub fn support_radius(&self, rel_tol: f64) -> f64 {
        let peak = self.phi.iter().fold(0.0f64, |m, p| m.max(p.abs()));
        if peak == 0.0 {
            return 0.0;
        }
        self.phi
            .iter()
            .rposition(|p| p.abs() > rel_tol * peak)
            .map_or(0.0, |k| self.grid.r(k))
    }
}

/// Relative threshold used when measuring the support of sampled data.
pub const SUPPORT_TOL: f64 = 1e-13;

/// Phase-space point `(u, u_t)` at a fixed time.
#[derive(Clone, Debug, PartialEq)]
pub struct WaveState {
    pub time: f64,
    pub u: RadialField,
    pub ut: RadialField,
}

impl WaveState {
    pub fn new(time: f64, u: RadialField, ut: RadialField) -> Result<Self> {
        if u.grid() != ut.grid() {
            return Err(Error::invalid("ut", "u and u_t must share a grid"));
        }
        if !time.is_finite() {
            return Err(Error::invalid("time", "must be finite"));
        }
        Ok(WaveState { time, u, ut })
    }

    /// State with the given displacement and zero velocity at `t = 0`.
    pub fn at_rest(u: RadialField) -> Self {
        let ut = RadialField::zeros(u.grid());
        WaveState { time: 0.0, u, ut }
    }

    pub fn grid(&self) -> &RadialGrid {
        self.u.grid()
    }

    pub fn support_radius(&self) -> f64 {
        self.u
            .support_radius(SUPPORT_TOL)
            .max(self.ut.support_radius(SUPPORT_TOL))
    }
}

/// Analytic radial test data.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Profile {
    /// `u(r) = e^{−a r²}`.
    Gaussian { a: f64 },
    /// `u(r) = a·exp(1 − 1/(1 − (r/b)²))` for `r < b`, zero outside; `u(0) = a`.
    Bump { a: f64, b: f64 },
    /// `u(r) = a(1 + r²)^{−m/2}`; square integrable on R³ only for `m > 3/2`.
    PolyDecay { a: f64, m: f64 },
}

impl Profile {
    pub fn gaussian(a: f64) -> Result<Self> {
        Profile::Gaussian { a }.validated()
    }

    pub fn bump(a: f64, b: f64) -> Result<Self> {
        Profile::Bump { a, b }.validated()
    }

    pub fn polydecay(a: f64, m: f64) -> Result<Self> {
        Profile::PolyDecay { a, m }.validated()
    }

    pub fn validated(self) -> Result<Self> {
        match self {
            Profile::Gaussian { a } if !(a.is_finite() && a > 0.0) => {
                Err(Error::invalid("a", "gaussian rate must be positive"))
            }
            Profile::Bump { a, b } if !(a.is_finite() && b.is_finite() && b > 0.0) => {
                Err(Error::invalid("b", "bump needs finite amplitude and positive radius"))
            }
            Profile::PolyDecay { a, m } if !a.is_finite() || !(m > 1.5) => Err(Error::invalid(
                "m",
                format!("polydecay exponent must exceed 3/2 for L², got {m}"),
            )),
            p => Ok(p),
        }
    }

    /// `u(|r|)`; evaluation at negative `r` gives the even extension.
    pub fn eval(&self, r: f64) -> f64 {
        let r = r.abs();
        match *self {
            Profile::Gaussian { a } => (-a * r * r).exp(),
            Profile::Bump { a, b } => {
                if a == 0.0 || r >= b {
                    0.0
                } else {
                    let x = r / b;
                    a * (1.0 - 1.0 / (1.0 - x * x)).exp()
                }
            }
            Profile::PolyDecay { a, m } => a * (1.0 + r * r).powf(-0.5 * m),
        }
    }

    /// `r·u(|r|)`, the odd extension of the 1D profile.
    pub fn phi(&self, r: f64) -> f64 {
        r * self.eval(r)
    }

    /// Samples the profile on `grid`.
    pub fn sample(&self, grid: &RadialGrid) -> Result<RadialField> {
        let p = self.validated()?;
        RadialField::from_fn(grid, |r| p.eval(r))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_spacing_and_points() {
        let g = RadialGrid::new(10.0, 9).unwrap();
        assert_eq!(g.spacing(), 1.0);
        let r: Vec<f64> = g.radii().collect();
        assert_eq!(r, (1..=9).map(|k| k as f64).collect::<Vec<_>>());

        let g = RadialGrid::new(20.0, 4095).unwrap();
        assert_eq!(g.spacing(), 0.0048828125);
    }

    #[test]
    fn grid_rejects_bad_arguments() {
        assert!(matches!(
            RadialGrid::new(-1.0, 100),
            Err(Error::InvalidArgument { field: "r_max", .. })
        ));
        assert!(matches!(
            RadialGrid::new(1.0, 7),
            Err(Error::InvalidArgument { field: "n", .. })
        ));
        assert!(RadialGrid::new(f64::NAN, 100).is_err());
    }

    #[test]
    fn gaussian_sample_is_r_times_profile() {
        let g = RadialGrid::new(5.0, 49).unwrap();
        let f = Profile::gaussian(1.0).unwrap().sample(&g).unwrap();
        for (k, r) in g.radii().enumerate() {
            assert_eq!(f.phi()[k], r * (-r * r).exp());
        }
    }

    #[test]
    fn zero_bump_is_zero_field() {
        let g = RadialGrid::new(5.0, 49).unwrap();
        assert!(Profile::bump(0.0, 1.0).unwrap().sample(&g).unwrap().is_zero());
    }

    #[test]
    fn polydecay_needs_square_integrability() {
        assert!(matches!(
            Profile::polydecay(1.0, 1.0),
            Err(Error::InvalidArgument { field: "m", .. })
        ));
        assert!(Profile::polydecay(1.0, 2.0).is_ok());
    }

    #[test]
    fn non_finite_profile_is_numeric_error() {
        let g = RadialGrid::new(5.0, 49).unwrap();
        let err = RadialField::from_fn(&g, |r| 1.0 / (r - g.r(3))).unwrap_err();
        assert!(matches!(err, Error::Numeric(_)));
    }

    #[test]
    fn origin_value_of_smooth_profiles() {
        let g = RadialGrid::new(10.0, 999).unwrap();
        assert!((g.spacing() - 0.01).abs() < 1e-15);
        let gauss = Profile::gaussian(1.0).unwrap().sample(&g).unwrap();
        assert!((gauss.u_at_origin() - 1.0).abs() < 1e-3);
        let lorentz = RadialField::from_fn(&g, |r| 1.0 / (1.0 + r * r)).unwrap();
        assert!((lorentz.u_at_origin() - 1.0).abs() < 1e-3);
        assert_eq!(RadialField::zeros(&g).u_at_origin(), 0.0);
    }

    #[test]
    fn origin_extrapolation_is_fourth_order() {
        let err = |n: usize| {
            let g = RadialGrid::new(8.0, n).unwrap();
            let f = Profile::gaussian(1.0).unwrap().sample(&g).unwrap();
            (f.u_at_origin() - 1.0).abs()
        };
        let coarse = err(199);
        let fine = err(399);
        // h halves exactly: (n + 1) doubles
        assert!(coarse / fine >= 14.0, "ratio {}", coarse / fine);
    }

    #[test]
    fn round_trip_u_phi_is_exact_to_one_rounding() {
        let g = RadialGrid::new(7.0, 123).unwrap();
        let f = Profile::polydecay(2.0, 3.0).unwrap().sample(&g).unwrap();
        for (k, (u, r)) in f.u_values().iter().zip(g.radii()).enumerate() {
            let exact = 2.0 * (1.0 + r * r).powf(-1.5);
            assert!((u - exact).abs() <= 2.0 * f64::EPSILON * exact.abs(), "k={k}");
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let g = RadialGrid::new(7.0, 123).unwrap();
        let p = Profile::bump(1.5, 3.0).unwrap();
        let a = p.sample(&g).unwrap();
        let b = p.sample(&g).unwrap();
        assert!(a.phi().iter().zip(b.phi()).all(|(x, y)| x.to_bits() == y.to_bits()));
    }

    #[test]
    fn mismatched_grids_rejected() {
        let a = RadialField::zeros(&RadialGrid::new(1.0, 10).unwrap());
        let b = RadialField::zeros(&RadialGrid::new(2.0, 10).unwrap());
        assert!(WaveState::new(0.0, a.clone(), b.clone()).is_err());
        assert!(a.add(&b).is_err());
    }
}
