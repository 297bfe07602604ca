//! Radix-2 FFT with the unitary normalization convention.
//!
//! Grids are power-of-two by construction, so a plain iterative
//! Cooley-Tukey transform with precomputed twiddles covers every transform
//! in the crate. Both directions scale by `1/sqrt(n)`, which makes Parseval
//! an exact invariant: the position-space and momentum-space norms agree.

use alloc::vec::Vec;

use crate::{C64, Error, Result};

/// Precomputed transform plan for one power-of-two length.
#[derive(Debug, Clone)]
pub struct FftPlan {
    n: usize,
    /// Twiddle factors e^{-i 2 pi k / n} for k in 0..n/2.
    twiddles: Vec<C64>,
    /// Bit-reversal permutation of 0..n.
    bitrev: Vec<u32>,
    /// 1/sqrt(n).
    scale: f64,
}

impl FftPlan {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::GridNotPowerOfTwo { n });
        }
        let twiddles = (0..n / 2)
            .map(|k| {
                let phase = -2.0 * core::f64::consts::PI * k as f64 / n as f64;
                C64::new(libm::cos(phase), libm::sin(phase))
            })
            .collect();
        let bits = n.trailing_zeros();
        let bitrev = (0..n as u32)
            .map(|i| i.reverse_bits() >> (32 - bits))
            .collect();
        Ok(Self { n, twiddles, bitrev, scale: 1.0 / libm::sqrt(n as f64) })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    /// Forward unitary transform, in place.
    pub fn forward(&self, buf: &mut [C64]) {
        self.transform(buf, false);
    }

    /// Inverse unitary transform, in place.
    pub fn inverse(&self, buf: &mut [C64]) {
        self.transform(buf, true);
    }

    fn transform(&self, buf: &mut [C64], inverse: bool) {
        let n = self.n;
        assert_eq!(buf.len(), n, "buffer length does not match plan");
        for (i, &j) in self.bitrev.iter().enumerate() {
            let j = j as usize;
            if i < j {
                buf.swap(i, j);
            }
        }
        let mut half = 1;
        while half < n {
            let stride = n / (2 * half);
            for start in (0..n).step_by(2 * half) {
                for k in 0..half {
                    let mut w = self.twiddles[k * stride];
                    if inverse {
                        w = w.conj();
                    }
                    let a = buf[start + k];
                    let b = buf[start + k + half] * w;
                    buf[start + k] = a + b;
                    buf[start + k + half] = a - b;
                }
            }
            half *= 2;
        }
        for v in buf.iter_mut() {
            *v *= self.scale;
        }
    }
}

/// Angular wavenumber of mode `j` on a periodic grid of `n` points with
/// spacing `dx`, in the usual fftfreq layout (negative frequencies in the
/// upper half).
pub fn wavenumber(j: usize, n: usize, dx: f64) -> f64 {
    let dk = 2.0 * core::f64::consts::PI / (n as f64 * dx);
    if j <= n / 2 {
        if j == n / 2 {
            -(j as f64) * dk
        } else {
            j as f64 * dk
        }
    } else {
        (j as f64 - n as f64) * dk
    }
}

/// Wavenumber for first derivatives: identical to [`wavenumber`] except the
/// Nyquist bin is zeroed, where the phase carries no usable sign.
pub fn derivative_wavenumber(j: usize, n: usize, dx: f64) -> f64 {
    if j == n / 2 {
        0.0
    } else {
        wavenumber(j, n, dx)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    // Quadratic-cost reference transform, written independently of the plan.
    fn naive_dft(input: &[C64]) -> Vec<C64> {
        let n = input.len();
        let scale = 1.0 / libm::sqrt(n as f64);
        (0..n)
            .map(|k| {
                let mut acc = C64::new(0.0, 0.0);
                for (j, &v) in input.iter().enumerate() {
                    let phase = -2.0 * core::f64::consts::PI * (k * j) as f64 / n as f64;
                    acc += v * C64::new(libm::cos(phase), libm::sin(phase));
                }
                acc * scale
            })
            .collect()
    }

    #[test]
    fn matches_naive_dft_on_random_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for &n in &[2usize, 8, 64, 256] {
            let plan = FftPlan::new(n).unwrap();
            let input: Vec<C64> = (0..n)
                .map(|_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
                .collect();
            let expected = naive_dft(&input);
            let mut buf = input.clone();
            plan.forward(&mut buf);
            for (got, want) in buf.iter().zip(&expected) {
                assert_abs_diff_eq!(got.re, want.re, epsilon = 1e-12);
                assert_abs_diff_eq!(got.im, want.im, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn single_mode_transforms_to_delta() {
        let n = 32;
        let plan = FftPlan::new(n).unwrap();
        let k0 = 5;
        let mut buf: Vec<C64> = (0..n)
            .map(|j| {
                let phase = 2.0 * core::f64::consts::PI * (k0 * j) as f64 / n as f64;
                C64::new(libm::cos(phase), libm::sin(phase))
            })
            .collect();
        plan.forward(&mut buf);
        for (k, v) in buf.iter().enumerate() {
            let expect = if k == k0 { libm::sqrt(n as f64) } else { 0.0 };
            assert_abs_diff_eq!(v.re, expect, epsilon = 1e-12);
            assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn roundtrip_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 128;
        let plan = FftPlan::new(n).unwrap();
        let input: Vec<C64> = (0..n)
            .map(|_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        let mut buf = input.clone();
        plan.forward(&mut buf);
        plan.inverse(&mut buf);
        for (got, want) in buf.iter().zip(&input) {
            assert_abs_diff_eq!(got.re, want.re, epsilon = 1e-13);
            assert_abs_diff_eq!(got.im, want.im, epsilon = 1e-13);
        }
    }

    #[test]
    fn rejects_non_power_of_two() {
        assert!(matches!(FftPlan::new(48), Err(Error::GridNotPowerOfTwo { n: 48 })));
        assert!(matches!(FftPlan::new(0), Err(Error::GridNotPowerOfTwo { .. })));
    }

    #[test]
    fn wavenumber_layout() {
        let n = 8;
        let dx = 0.5;
        let dk = 2.0 * core::f64::consts::PI / (n as f64 * dx);
        assert_abs_diff_eq!(wavenumber(0, n, dx), 0.0);
        assert_abs_diff_eq!(wavenumber(1, n, dx), dk);
        assert_abs_diff_eq!(wavenumber(3, n, dx), 3.0 * dk);
        assert_abs_diff_eq!(wavenumber(4, n, dx), -4.0 * dk);
        assert_abs_diff_eq!(wavenumber(5, n, dx), -3.0 * dk);
        assert_abs_diff_eq!(wavenumber(7, n, dx), -dk);
        assert_abs_diff_eq!(derivative_wavenumber(4, n, dx), 0.0);
        let mut buf = vec![C64::new(0.0, 0.0); n];
        buf[0] = C64::new(1.0, 0.0);
        // delta transforms to a flat spectrum under the unitary convention
        let plan = FftPlan::new(n).unwrap();
        plan.forward(&mut buf);
        for v in &buf {
            assert_abs_diff_eq!(v.re, 1.0 / libm::sqrt(n as f64), epsilon = 1e-14);
        }
    }
}
