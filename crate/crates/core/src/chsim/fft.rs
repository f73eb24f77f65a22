//! Iterative radix-2 FFT.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

#[derive(Clone, Debug)]
pub struct Fft {
    n: usize,
    rev: Vec<usize>,
    /// `exp(-2πi j / n)` for `j < n/2`.
    twiddles: Vec<Complex64>,
}

impl Fft {
    /// # Panics
    ///
    /// If `n` is not a power of two.
    pub fn new(n: usize) -> Self {
        assert!(n.is_power_of_two(), "fft length must be a power of two");
        let bits = n.trailing_zeros();
        let rev = (0..n)
            .map(|i| if bits == 0 { 0 } else { i.reverse_bits() >> (usize::BITS - bits) })
            .collect();
        let twiddles = (0..n / 2)
            .map(|j| {
                let a = -2.0 * PI * j as f64 / n as f64;
                Complex64::new(a.cos(), a.sin())
            })
            .collect();
        Fft { n, rev, twiddles }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    fn transform(&self, a: &mut [Complex64], inverse: bool) {
        assert_eq!(a.len(), self.n);
        for i in 0..self.n {
            let j = self.rev[i];
            if i < j {
                a.swap(i, j);
            }
        }
        let mut len = 2;
        while len <= self.n {
            let stride = self.n / len;
            for start in (0..self.n).step_by(len) {
                for k in 0..len / 2 {
                    let w = self.twiddles[k * stride];
                    let w = if inverse { w.conj() } else { w };
                    let x = a[start + k];
                    let y = a[start + k + len / 2] * w;
                    a[start + k] = x + y;
                    a[start + k + len / 2] = x - y;
                }
            }
            len <<= 1;
        }
    }

    /// Unnormalized forward transform `X_k = Σ x_j e^{-2πi jk/n}`.
    pub fn forward(&self, a: &mut [Complex64]) {
        self.transform(a, false);
    }

    /// Inverse transform including the `1/n` factor.
    pub fn inverse(&self, a: &mut [Complex64]) {
        self.transform(a, true);
        let s = 1.0 / self.n as f64;
        for z in a.iter_mut() {
            *z *= s;
        }
    }

    pub fn forward_real(&self, x: &[f64]) -> Vec<Complex64> {
        let mut a: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward(&mut a);
        a
    }

    /// Real part of the inverse transform.
    pub fn inverse_real(&self, mut a: Vec<Complex64>) -> Vec<f64> {
        self.inverse(&mut a);
        a.into_iter().map(|z| z.re).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive(x: &[Complex64]) -> Vec<Complex64> {
        let n = x.len();
        (0..n)
            .map(|k| {
                x.iter().enumerate().fold(Complex64::new(0.0, 0.0), |acc, (j, &v)| {
                    let a = -2.0 * PI * (j * k) as f64 / n as f64;
                    acc + v * Complex64::new(a.cos(), a.sin())
                })
            })
            .collect()
    }

    #[test]
    fn matches_direct_sum() {
        for n in [1usize, 2, 8, 64] {
            let x: Vec<Complex64> =
                (0..n).map(|j| Complex64::new((j as f64 * 0.7).sin(), (j * j) as f64 / 50.0)).collect();
            let mut a = x.clone();
            let f = Fft::new(n);
            f.forward(&mut a);
            for (p, q) in a.iter().zip(naive(&x)) {
                assert!((p - q).norm() < 1e-10);
            }
            f.inverse(&mut a);
            for (p, q) in a.iter().zip(&x) {
                assert!((p - q).norm() < 1e-12);
            }
        }
    }
}
