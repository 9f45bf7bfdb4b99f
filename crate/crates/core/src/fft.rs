//! Forward complex DFT of arbitrary length.
//!
//! Lengths whose prime factors are all at most 7 use a mixed-radix Stockham
//! kernel. Every other length goes through Bluestein's chirp-z
//! reformulation on a padded 5-smooth buffer, so all lengths cost
//! O(n log n).

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;

fn unit(angle: f64) -> Complex64 {
    Complex64::new(angle.cos(), angle.sin())
}

/// Radix schedule: fours first, then the remaining primes in increasing
/// order. `None` if a prime factor exceeds 7.
fn factorize(mut n: usize) -> Option<Vec<usize>> {
    let mut out = Vec::new();
    while n % 4 == 0 {
        out.push(4);
        n /= 4;
    }
    for p in [2, 3, 5, 7] {
        while n % p == 0 {
            out.push(p);
            n /= p;
        }
    }
    (n == 1).then_some(out)
}

/// Smallest `2^a 3^b 5^c ≥ n`.
fn next_smooth(n: usize) -> usize {
    let mut best = n.next_power_of_two();
    let mut p3 = 1;
    while p3 < best {
        let mut p35 = p3;
        while p35 < best {
            let mut m = p35;
            while m < n {
                m *= 2;
            }
            best = best.min(m);
            p35 *= 5;
        }
        p3 *= 3;
    }
    best
}

#[derive(Debug)]
struct Stage {
    radix: usize,
    // e^{-2πi p k / len} for p < len/radix, k = 1..radix, row-major in p
    twiddles: Vec<Complex64>,
    // e^{-2πi j / radix}
    roots: Vec<Complex64>,
}

/// Self-sorting (Stockham) decimation-in-frequency FFT.
#[derive(Debug)]
struct MixedRadix {
    n: usize,
    stages: Vec<Stage>,
}

impl MixedRadix {
    fn new(n: usize, factors: &[usize]) -> Self {
        let mut len = n;
        let stages = factors
            .iter()
            .map(|&radix| {
                let m = len / radix;
                let mut twiddles = Vec::with_capacity(m * (radix - 1));
                for p in 0..m {
                    for k in 1..radix {
                        twiddles.push(unit(-2.0 * PI * ((p * k) % len) as f64 / len as f64));
                    }
                }
                let roots = (0..radix)
                    .map(|j| unit(-2.0 * PI * j as f64 / radix as f64))
                    .collect();
                len = m;
                Stage {
                    radix,
                    twiddles,
                    roots,
                }
            })
            .collect();
        MixedRadix { n, stages }
    }

    fn forward(&self, buf: &mut [Complex64]) {
        debug_assert_eq!(buf.len(), self.n);
        if self.stages.is_empty() {
            return;
        }
        let mut scratch = vec![Complex64::new(0.0, 0.0); self.n];
        let mut src: &mut [Complex64] = buf;
        let mut dst: &mut [Complex64] = &mut scratch;
        let mut len = self.n;
        let mut stride = 1;
        for stage in &self.stages {
            let m = len / stage.radix;
            let tw = &stage.twiddles;
            match stage.radix {
                2 => pass::<2>(src, dst, m, stride, tw, radix2),
                3 => pass::<3>(src, dst, m, stride, tw, radix3),
                4 => pass::<4>(src, dst, m, stride, tw, radix4),
                5 => pass::<5>(src, dst, m, stride, tw, radix5),
                _ => pass::<7>(src, dst, m, stride, tw, |a| generic(a, &stage.roots)),
            }
            core::mem::swap(&mut src, &mut dst);
            len = m;
            stride *= stage.radix;
        }
        if self.stages.len() % 2 == 1 {
            // the result sits in `scratch`, now borrowed as `src`
            dst.copy_from_slice(src);
        }
    }
}

/// One Stockham stage: input element `(q, p + j m)` and output element
/// `(q, R p + k)`, both with column stride `s`, output scaled by the
/// stage twiddle `w_{p k}`.
fn pass<const R: usize>(
    x: &[Complex64],
    y: &mut [Complex64],
    m: usize,
    s: usize,
    tw: &[Complex64],
    butterfly: impl Fn([Complex64; R]) -> [Complex64; R],
) {
    if s < 8 {
        // short columns: plain indexing beats building row slices
        for ((p, out), w) in y.chunks_exact_mut(R * s).enumerate().zip(tw.chunks_exact(R - 1)) {
            for q in 0..s {
                let b = butterfly(core::array::from_fn(|j| x[q + s * (p + j * m)]));
                out[q] = b[0];
                for k in 1..R {
                    out[k * s + q] = b[k] * w[k - 1];
                }
            }
        }
        return;
    }
    for (p, out) in y.chunks_exact_mut(R * s).enumerate() {
        let w = &tw[(R - 1) * p..(R - 1) * (p + 1)];
        let rows: [&[Complex64]; R] = core::array::from_fn(|j| &x[s * (p + j * m)..][..s]);
        for q in 0..s {
            let b = butterfly(core::array::from_fn(|j| rows[j][q]));
            out[q] = b[0];
            for k in 1..R {
                out[k * s + q] = b[k] * w[k - 1];
            }
        }
    }
}

/// `−i z`
#[inline(always)]
fn minus_i(z: Complex64) -> Complex64 {
    Complex64::new(z.im, -z.re)
}

#[inline(always)]
fn radix2([a0, a1]: [Complex64; 2]) -> [Complex64; 2] {
    [a0 + a1, a0 - a1]
}

#[inline(always)]
fn radix3([a0, a1, a2]: [Complex64; 3]) -> [Complex64; 3] {
    const SIN_60: f64 = 0.866_025_403_784_438_6;
    let sum = a1 + a2;
    let mid = a0 - sum * 0.5;
    let rot = minus_i(a1 - a2) * SIN_60;
    [a0 + sum, mid + rot, mid - rot]
}

#[inline(always)]
fn radix4([a0, a1, a2, a3]: [Complex64; 4]) -> [Complex64; 4] {
    let t0 = a0 + a2;
    let t1 = a0 - a2;
    let t2 = a1 + a3;
    let t3 = minus_i(a1 - a3);
    [t0 + t2, t1 + t3, t0 - t2, t1 - t3]
}

#[inline(always)]
fn radix5([a0, a1, a2, a3, a4]: [Complex64; 5]) -> [Complex64; 5] {
    // cos and sin of 2π/5 and 4π/5
    const C1: f64 = 0.309_016_994_374_947_45;
    const C2: f64 = -0.809_016_994_374_947_5;
    const S1: f64 = 0.951_056_516_295_153_5;
    const S2: f64 = 0.587_785_252_292_473_1;
    let b1 = a1 + a4;
    let b2 = a2 + a3;
    let d1 = a1 - a4;
    let d2 = a2 - a3;
    let e1 = a0 + b1 * C1 + b2 * C2;
    let e2 = a0 + b1 * C2 + b2 * C1;
    let f1 = minus_i(d1 * S1 + d2 * S2);
    let f2 = minus_i(d1 * S2 - d2 * S1);
    [a0 + b1 + b2, e1 + f1, e2 + f2, e2 - f2, e1 - f1]
}

fn generic<const R: usize>(a: [Complex64; R], roots: &[Complex64]) -> [Complex64; R] {
    core::array::from_fn(|k| {
        a.iter()
            .enumerate()
            .fold(Complex64::new(0.0, 0.0), |acc, (j, v)| acc + v * roots[(j * k) % R])
    })
}

#[derive(Debug)]
struct Bluestein {
    n: usize,
    inner: MixedRadix,
    chirp: Vec<Complex64>,
    // Transform of the conjugate chirp, pre-scaled by 1/m.
    kernel: Vec<Complex64>,
}

impl Bluestein {
    fn new(n: usize) -> Self {
        let m = next_smooth(2 * n - 1);
        let inner = MixedRadix::new(m, &factorize(m).expect("5-smooth length"));
        let two_n = 2 * n as u64;
        let chirp: Vec<Complex64> = (0..n as u64)
            .map(|k| {
                // k² mod 2n keeps the phase argument small and exact
                let q = (k * k) % two_n;
                unit(-PI * q as f64 / n as f64)
            })
            .collect();
        let mut kernel = vec![Complex64::new(0.0, 0.0); m];
        kernel[0] = chirp[0].conj();
        for k in 1..n {
            kernel[k] = chirp[k].conj();
            kernel[m - k] = chirp[k].conj();
        }
        inner.forward(&mut kernel);
        let scale = 1.0 / m as f64;
        for z in &mut kernel {
            *z *= scale;
        }
        Bluestein {
            n,
            inner,
            chirp,
            kernel,
        }
    }

    fn forward(&self, buf: &mut [Complex64]) {
        let m = self.inner.n;
        let mut work = vec![Complex64::new(0.0, 0.0); m];
        for ((w, x), c) in work.iter_mut().zip(buf.iter()).zip(&self.chirp) {
            *w = *x * *c;
        }
        self.inner.forward(&mut work);
        for (w, k) in work.iter_mut().zip(&self.kernel) {
            // conj so that the following forward pass acts as an inverse
            *w = (*w * *k).conj();
        }
        self.inner.forward(&mut work);
        for ((x, w), c) in buf.iter_mut().zip(&work).zip(&self.chirp) {
            *x = w.conj() * *c;
        }
        debug_assert_eq!(buf.len(), self.n);
    }
}

#[derive(Debug)]
enum Kernel {
    Direct(MixedRadix),
    Bluestein(Bluestein),
}

/// Precomputed plan for an unnormalized forward DFT
/// `X_k = Σ_j x_j e^{-2πi jk/n}`.
#[derive(Debug)]
pub(crate) struct Fft {
    len: usize,
    kernel: Kernel,
}

impl Fft {
    pub(crate) fn new(len: usize) -> Self {
        assert!(len > 0, "empty transform");
        let kernel = match factorize(len) {
            Some(factors) => Kernel::Direct(MixedRadix::new(len, &factors)),
            None => Kernel::Bluestein(Bluestein::new(len)),
        };
        Fft { len, kernel }
    }

    pub(crate) fn len(&self) -> usize {
        self.len
    }

    pub(crate) fn forward(&self, buf: &mut [Complex64]) {
        assert_eq!(buf.len(), self.len, "buffer length does not match plan");
        match &self.kernel {
            Kernel::Direct(k) => k.forward(buf),
            Kernel::Bluestein(k) => k.forward(buf),
        }
    }
}
