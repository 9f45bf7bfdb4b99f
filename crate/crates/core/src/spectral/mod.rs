//! Fourier side of radial fields.
//!
//! For radial `u` on R³ the Fourier transform reduces to a sine transform of
//! `φ = r·u`: `û(ρ) = (4π/ρ) ∫ φ(r) sin(ρr) dr`. On the grid this is the DST-I
//! with modes `sin(ρ_m r)`, `ρ_m = mπ/r_max`, so any radial Fourier
//! multiplier acts diagonally on the sine coefficients.

pub mod kernel;
pub mod transform;

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::radial::{RadialField, RadialGrid, WaveState};
pub use kernel::{kernel, kernel_symbol};

/// Sine coefficients of `φ`: `φ(r_k) = Σ_m coeff[m] sin(ρ_m r_k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    grid: RadialGrid,
    coeff: Vec<f64>,
}

impl SpectralField {
    pub fn new(grid: &RadialGrid, coeff: Vec<f64>) -> Result<Self> {
        if coeff.len() != grid.len() {
            return Err(Error::invalid("coeff", "length must match the grid"));
        }
        Ok(SpectralField {
            grid: grid.clone(),
            coeff,
        })
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn coeff(&self) -> &[f64] {
        &self.coeff
    }

    /// `(ρ_m, c_m)` pairs.
    pub fn modes(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.coeff
            .iter()
            .enumerate()
            .map(move |(m, &c)| (self.grid.frequency(m), c))
    }

    /// Multiplies every coefficient by `symbol(ρ_m)`.
    pub fn apply(&self, symbol: &impl Multiplier) -> SpectralField {
        let coeff = self.modes().map(|(rho, c)| symbol.symbol(rho) * c).collect();
        SpectralField {
            grid: self.grid.clone(),
            coeff,
        }
    }

    /// `Σ_m weight(ρ_m) c_m²` scaled by the Parseval weight, i.e. the
    /// squared `L²(R³)` norm of the multiplied field when `weight = m²`.
    pub fn weighted_energy(&self, weight: impl Fn(f64) -> f64) -> f64 {
        parseval_weight(&self.grid) * self.modes().map(|(rho, c)| weight(rho) * c * c).sum::<f64>()
    }
}

/// `w` such that `‖u‖²_{L²(R³)} = w Σ c_m²` exactly for the trapezoid rule.
pub fn parseval_weight(grid: &RadialGrid) -> f64 {
    2.0 * PI * grid.r_max()
}

/// Radial Fourier multiplier.
pub trait Multiplier {
    fn symbol(&self, rho: f64) -> f64;
}

impl<F: Fn(f64) -> f64> Multiplier for F {
    fn symbol(&self, rho: f64) -> f64 {
        self(rho)
    }
}

pub fn dst(f: &RadialField) -> SpectralField {
    let grid = f.grid();
    SpectralField {
        grid: grid.clone(),
        coeff: grid.plan().analysis(f.phi()),
    }
}

pub fn idst(s: &SpectralField) -> RadialField {
    let phi = s.grid.plan().sine_synthesis(&s.coeff);
    RadialField::from_phi_unchecked(&s.grid, phi)
}

/// Applies a multiplier in physical space: `idst(symbol · dst(f))`.
pub fn apply_multiplier(f: &RadialField, symbol: &impl Multiplier) -> RadialField {
    idst(&dst(f).apply(symbol))
}

/// `∂_r φ` at `r_0 = 0, r_1, …, r_n, r_{n+1} = r_max` (length `n + 2`).
pub fn radial_derivative(s: &SpectralField) -> Vec<f64> {
    let b: Vec<f64> = s.modes().map(|(rho, c)| rho * c).collect();
    s.grid.plan().cosine_synthesis(&b)
}

/// `∂_rr φ` at the interior points, applied exactly on the sine modes.
pub fn second_derivative(f: &RadialField) -> RadialField {
    apply_multiplier(f, &|rho: f64| -rho * rho)
}

/// Range of Sobolev exponents accepted by [`sobolev_norm`].
pub const SOBOLEV_RANGE: (f64, f64) = (-1.0, 2.0);

/// Homogeneous Sobolev norm `‖u‖_{Ḣ^s(R³)}`.
///
/// For `s < 0` the symbol `ρ^{2s}` is only regularized by the lowest grid
/// frequency `π/r_max`, so the value depends on `r_max`.
pub fn sobolev_norm(f: &RadialField, s: f64) -> Result<f64> {
    check_sobolev_exponent(s)?;
    Ok(sobolev_norm_spectral(&dst(f), s))
}

pub(crate) fn sobolev_norm_spectral(sf: &SpectralField, s: f64) -> f64 {
    if s == 0.0 {
        sf.weighted_energy(|_| 1.0).sqrt()
    } else {
        sf.weighted_energy(|rho| rho.powf(2.0 * s)).sqrt()
    }
}

fn check_sobolev_exponent(s: f64) -> Result<()> {
    let (lo, hi) = SOBOLEV_RANGE;
    if !(lo..=hi).contains(&s) {
        return Err(Error::invalid("s", format!("Sobolev exponent {s} outside [{lo}, {hi}]")));
    }
    Ok(())
}

/// Critical regularity `s_c = 3/2 − 2/(p − 1)` left invariant by the
/// scaling of the equation.
pub fn critical_exponent(p: f64) -> Result<f64> {
    if !(p > 1.0 && p <= 5.0) {
        return Err(Error::invalid("p", format!("need 1 < p ≤ 5, got {p}")));
    }
    Ok(1.5 - 2.0 / (p - 1.0))
}

/// Evaluates the sine series of `s` at an arbitrary radius (Clenshaw).
/// Radii outside `[0, r_max]` evaluate to zero.
pub fn evaluate_at(s: &SpectralField, r: f64) -> f64 {
    let r_max = s.grid.r_max();
    if !(r > 0.0 && r < r_max) {
        return 0.0;
    }
    let theta = PI * r / r_max;
    let (sin_t, cos_t) = theta.sin_cos();
    let alpha = 2.0 * cos_t;
    let (mut b1, mut b2) = (0.0, 0.0);
    for &c in s.coeff.iter().rev() {
        let b0 = c + alpha * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    b1 * sin_t
}

fn resample(f: &RadialField, map: impl Fn(f64) -> f64, factor: f64) -> RadialField {
    let sf = dst(f);
    let grid = f.grid();
    let phi = grid.radii().map(|r| factor * evaluate_at(&sf, map(r))).collect();
    RadialField::from_phi_unchecked(grid, phi)
}

/// Fraction of the `L²` energy carried by modes above `cutoff`.
fn spectral_tail(sf: &SpectralField, cutoff: f64) -> f64 {
    let total: f64 = sf.coeff.iter().map(|c| c * c).sum();
    if total == 0.0 {
        return 0.0;
    }
    sf.modes()
        .filter(|(rho, _)| *rho > cutoff)
        .map(|(_, c)| c * c)
        .sum::<f64>()
        / total
}

/// Tolerated fraction of spectral energy pushed past the grid's Nyquist
/// frequency by a rescaling with `λ > 1`.
pub const RESCALE_TAIL_TOL: f64 = 1e-12;

/// Scaling symmetry of the equation on the same grid:
/// `u ↦ λ^{2/(p−1)} u(λx)`, `u_t ↦ λ^{2/(p−1)+1} u_t(λx)`, and `t ↦ t/λ`.
///
/// The resampling evaluates the sine series exactly at `λ r_k`; values
/// beyond `r_max` are zero, which requires the data to be supported inside
/// the domain.
pub fn rescale(state: &WaveState, lambda: f64, p: f64) -> Result<WaveState> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::invalid("lambda", format!("must be positive, got {lambda}")));
    }
    critical_exponent(p)?;
    if lambda == 1.0 {
        return Ok(state.clone());
    }
    let grid = state.grid();
    let support = state.support_radius();
    if support > 0.0 {
        let new_support = support / lambda;
        if new_support < 4.0 * grid.spacing() {
            return Err(Error::Resolution(format!(
                "rescaled support {new_support:.3e} spans fewer than 4 grid points"
            )));
        }
        if new_support >= grid.r_max() {
            return Err(Error::Resolution(format!(
                "rescaled support {new_support:.3e} exceeds r_max = {}",
                grid.r_max()
            )));
        }
        if lambda > 1.0 {
            let cutoff = grid.nyquist() / lambda;
            let tail = spectral_tail(&dst(&state.u), cutoff).max(spectral_tail(&dst(&state.ut), cutoff));
            if tail > RESCALE_TAIL_TOL {
                return Err(Error::Resolution(format!(
                    "rescaled data exceeds the grid bandwidth (tail fraction {tail:.2e})"
                )));
            }
        }
    }
    let alpha = 2.0 / (p - 1.0);
    // φ_λ(r) = r·λ^α u(λr) = λ^{α−1} φ(λr); likewise with one more power for u_t.
    let u = resample(&state.u, |r| lambda * r, lambda.powf(alpha - 1.0));
    let ut = resample(&state.ut, |r| lambda * r, lambda.powf(alpha));
    WaveState::new(state.time / lambda, u, ut)
}

/// Which side of the dyadic cutoff a sharp projection keeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Band {
    /// `ρ ≤ 2^j`
    Leq,
    /// `2^{j−1} < ρ ≤ 2^j`
    Band,
    /// `ρ > 2^j`
    Geq,
}

/// Indicator symbol of a sharp Littlewood–Paley projection.
#[derive(Clone, Copy, Debug)]
pub struct SharpProjection {
    pub j: i32,
    pub kind: Band,
}

impl Multiplier for SharpProjection {
    fn symbol(&self, rho: f64) -> f64 {
        let top = 2.0f64.powi(self.j);
        let keep = match self.kind {
            Band::Leq => rho <= top,
            Band::Geq => rho > top,
            Band::Band => rho <= top && rho > 0.5 * top,
        };
        if keep {
            1.0
        } else {
            0.0
        }
    }
}

/// Sharp Fourier cutoff at `ρ = 2^j`.
pub fn lp_project(f: &RadialField, j: i32, kind: Band) -> RadialField {
    apply_multiplier(f, &SharpProjection { j, kind })
}

/// Symbol of the smoothed pieces `P̃_j`: `ψ̂(ρ)` for `j = 0`, otherwise
/// `ψ̂(ρ/2^j) − ψ̂(ρ/2^{j−1})`.
#[derive(Clone, Copy, Debug)]
pub struct SmoothPiece {
    pub j: u32,
}

impl Multiplier for SmoothPiece {
    fn symbol(&self, rho: f64) -> f64 {
        let scale = 2.0f64.powi(self.j as i32);
        if self.j == 0 {
            kernel_symbol(rho)
        } else {
            kernel_symbol(rho / scale) - kernel_symbol(2.0 * rho / scale)
        }
    }
}

/// Symbol of `ψ_{2^j} *`, the smoothed projection onto frequencies `≲ 2^j`.
#[derive(Clone, Copy, Debug)]
pub struct SmoothLowPass {
    pub j: i32,
}

impl Multiplier for SmoothLowPass {
    fn symbol(&self, rho: f64) -> f64 {
        kernel_symbol(rho / 2.0f64.powi(self.j))
    }
}

/// `P̃_j f`: convolution with `ψ_{2^j} − ψ_{2^{j−1}}` (or `ψ` for `j = 0`),
/// where `ψ_λ(x) = λ³ψ(λx)`. The radial 3D convolution is applied exactly
/// through the sine coefficients of `φ`.
pub fn smooth_project(f: &RadialField, j: u32) -> RadialField {
    apply_multiplier(f, &SmoothPiece { j })
}

/// `ψ_{2^j} * f`.
pub fn smooth_low_pass(f: &RadialField, j: i32) -> RadialField {
    apply_multiplier(f, &SmoothLowPass { j })
}
