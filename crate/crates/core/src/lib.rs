//! Spectral laboratory for the radial defocusing nonlinear wave equation
//! `u_tt − Δu + |u|^{p−1}u = 0` on R³.
//!
//! Everything here is pure computation over `alloc` buffers: radial grids
//! and fields, the sine-transform calculus (Sobolev norms, scaling,
//! Littlewood–Paley projections), leapfrog solvers for the flat and
//! hyperbolic-coordinate equations, the Fourier-truncation split, and the
//! conserved/monotone functionals used to check them. IO lives in the
//! companion crate.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
pub mod functionals;
mod fft;
pub mod radial;
pub mod solver;
pub mod spectral;
pub mod truncation;

pub use error::{Error, Result};
pub use radial::{Profile, RadialField, RadialGrid, WaveState};
