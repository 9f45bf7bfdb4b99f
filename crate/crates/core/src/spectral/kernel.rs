//! The compactly supported Littlewood–Paley kernel and its Fourier symbol.
//!
//! `ψ(x) = (315/8π)(1 − 4|x|²)³` on `|x| ≤ 1/2`: radial, decreasing, C², with
//! unit integral over R³. Its 3D Fourier transform is
//! `ψ̂(ξ) = 945 j₄(|ξ|/2)/(|ξ|/2)⁴`, with `j₄` the spherical Bessel function.

use core::f64::consts::PI;

/// Normalization making `∫_{R³} ψ = 1`.
pub const KERNEL_NORMALIZATION: f64 = 315.0 / (8.0 * PI);

/// Support radius of `ψ`.
pub const KERNEL_RADIUS: f64 = 0.5;

/// `ψ(r)` for `r = |x|`.
pub fn kernel(r: f64) -> f64 {
    let r = r.abs();
    if r >= KERNEL_RADIUS {
        0.0
    } else {
        let q = 1.0 - 4.0 * r * r;
        KERNEL_NORMALIZATION * q * q * q
    }
}

/// `ψ̂(ξ)`, normalized so that `ψ̂(0) = 1`.
pub fn kernel_symbol(xi: f64) -> f64 {
    let k = 0.5 * xi.abs();
    if k < 4.0 {
        symbol_series(k)
    } else {
        symbol_closed_form(k)
    }
}

// 945 Σ_m (−k²/2)^m / (m! (2m+9)!!)
fn symbol_series(k: f64) -> f64 {
    let x = -0.5 * k * k;
    let mut term: f64 = 1.0;
    let mut sum = 1.0;
    let mut m = 0.0;
    while term.abs() > 1e-18 {
        term *= x / ((m + 1.0) * (2.0 * m + 11.0));
        sum += term;
        m += 1.0;
    }
    sum
}

fn symbol_closed_form(k: f64) -> f64 {
    let (s, c) = k.sin_cos();
    let k2 = k * k;
    let j4 = ((1.0 - 45.0 / k2 + 105.0 / (k2 * k2)) * s + (10.0 / k - 105.0 / (k2 * k)) * c) / k;
    945.0 * j4 / (k2 * k2)
}
