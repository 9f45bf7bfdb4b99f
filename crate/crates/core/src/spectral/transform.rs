//! Type-I sine and cosine syntheses through a half-length complex FFT.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;

use crate::fft::Fft;

/// Plan for the DST-I / DCT-I pair on `n` interior points.
///
/// With `K = n + 1` both transforms are read off the DFT of a real sequence
/// of length `2K` (odd or even extension), which is packed into a complex
/// sequence of length `K`.
#[derive(Debug)]
pub struct SineTransform {
    n: usize,
    fft: Fft,
    // e^{-iπk/K}, k = 0..=K
    post: Vec<Complex64>,
}

impl SineTransform {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let k_len = n + 1;
        let post = (0..=k_len)
            .map(|k| {
                let angle = -PI * k as f64 / k_len as f64;
                Complex64::new(angle.cos(), angle.sin())
            })
            .collect();
        SineTransform {
            n,
            fft: Fft::new(k_len),
            post,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// DFT bins `X_0..=X_K` of the length-2K real sequence whose samples at
    /// `1..=n` are `values`, with `sign` selecting the odd (-1) or even (+1)
    /// extension and zeros at indices 0 and K.
    fn extended_spectrum(&self, values: &[f64], sign: f64) -> Vec<Complex64> {
        let n = self.n;
        let k_len = self.fft.len();
        assert_eq!(values.len(), n, "length mismatch");
        let sample = |j: usize| -> f64 {
            if j == 0 || j == k_len {
                0.0
            } else if j < k_len {
                values[j - 1]
            } else {
                sign * values[2 * k_len - j - 1]
            }
        };
        let mut z: Vec<Complex64> = (0..k_len)
            .map(|j| Complex64::new(sample(2 * j), sample(2 * j + 1)))
            .collect();
        self.fft.forward(&mut z);
        let mut out = vec![Complex64::new(0.0, 0.0); k_len + 1];
        for (k, slot) in out.iter_mut().enumerate() {
            let zk = z[k % k_len];
            let zc = z[(k_len - k % k_len) % k_len].conj();
            let even = (zk + zc) * 0.5;
            let odd = (zk - zc) * Complex64::new(0.0, -0.5);
            *slot = even + self.post[k] * odd;
        }
        out
    }

    /// `y_k = Σ_{m=1}^{n} x_m sin(π m k / (n+1))` for `k = 1..=n`.
    pub fn sine_synthesis(&self, x: &[f64]) -> Vec<f64> {
        let spec = self.extended_spectrum(x, -1.0);
        spec[1..=self.n].iter().map(|z| -0.5 * z.im).collect()
    }

    /// `y_k = Σ_{m=1}^{n} b_m cos(π m k / (n+1))` for `k = 0..=n+1`.
    pub fn cosine_synthesis(&self, b: &[f64]) -> Vec<f64> {
        let spec = self.extended_spectrum(b, 1.0);
        spec.iter().map(|z| 0.5 * z.re).collect()
    }

    /// Coefficients `c` with `x_k = Σ_m c_m sin(π m k/(n+1))`.
    pub fn analysis(&self, x: &[f64]) -> Vec<f64> {
        let scale = 2.0 / (self.n + 1) as f64;
        let mut c = self.sine_synthesis(x);
        for v in &mut c {
            *v *= scale;
        }
        c
    }
}
