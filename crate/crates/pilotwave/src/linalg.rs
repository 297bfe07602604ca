//! Dense complex linear algebra at tomography scale: small Hermitian
//! matrices and dominant rank-one factors of restricted amplitude blocks.

use alloc::vec::Vec;

use crate::{C64, Error, Result};

/// Small square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    dim: usize,
    data: Vec<C64>,
}

impl CMat {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: alloc::vec![C64::new(0.0, 0.0); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, C64::new(1.0, 0.0));
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.data[r * self.dim + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: C64) {
        self.data[r * self.dim + c] = v;
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::LengthMismatch { left: self.dim, right: other.dim });
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(Self { dim: self.dim, data })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::LengthMismatch { left: self.dim, right: other.dim });
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(Self { dim: self.dim, data })
    }

    /// `(A + A^dagger) / 2`.
    pub fn hermitized(&self) -> Self {
        let mut out = Self::zeros(self.dim);
        for r in 0..self.dim {
            for c in 0..self.dim {
                out.set(r, c, 0.5 * (self.get(r, c) + self.get(c, r).conj()));
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|a| a.norm_sqr()).sum())
    }

    /// Real quadratic form `c^dagger A c`; meaningful for Hermitian `A`.
    pub fn quadratic_form(&self, c: &[C64]) -> f64 {
        let mut acc = C64::new(0.0, 0.0);
        for r in 0..self.dim {
            for col in 0..self.dim {
                acc += c[r].conj() * self.get(r, col) * c[col];
            }
        }
        acc.re
    }

    /// Eigenvalues of a Hermitian matrix by cyclic complex Jacobi rotations,
    /// ascending.
    pub fn eigvals_hermitian(&self) -> Vec<f64> {
        let n = self.dim;
        let mut a = self.clone();
        let scale = a.frobenius_norm().max(1e-300);
        for _sweep in 0..60 {
            let mut off = 0.0;
            for p in 0..n {
                for q in (p + 1)..n {
                    off += a.get(p, q).norm_sqr();
                }
            }
            if libm::sqrt(off) < 1e-14 * scale {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a.get(p, q);
                    if apq.norm_sqr() < 1e-300 {
                        continue;
                    }
                    // phase that makes the off-diagonal entry real, then a
                    // plane rotation that annihilates it
                    let phi = libm::atan2(apq.im, apq.re);
                    let e_minus = C64::new(libm::cos(phi), -libm::sin(phi));
                    let g = apq.norm();
                    let app = a.get(p, p).re;
                    let aqq = a.get(q, q).re;
                    let theta = 0.5 * libm::atan2(2.0 * g, app - aqq);
                    let (s, c) = (libm::sin(theta), libm::cos(theta));
                    // column rotation: A <- A J where J mixes columns p and q
                    for r in 0..n {
                        let arp = a.get(r, p);
                        let arq = a.get(r, q);
                        // column p gains the phase-aligned q component
                        a.set(r, p, arp * c + arq * e_minus.conj() * s);
                        a.set(r, q, -arp * e_minus * s + arq * c);
                    }
                    // row rotation: A <- J^dagger A
                    for col in 0..n {
                        let apc = a.get(p, col);
                        let aqc = a.get(q, col);
                        a.set(p, col, apc * c + aqc * e_minus * s);
                        a.set(q, col, -apc * e_minus.conj() * s + aqc * c);
                    }
                }
            }
        }
        let mut vals: Vec<f64> = (0..n).map(|i| a.get(i, i).re).collect();
        vals.sort_unstable_by(|x, y| x.partial_cmp(y).unwrap());
        vals
    }
}

/// Dominant singular triple `(sigma, u, v)` of a dense `rows x cols` complex
/// matrix (row-major), `A v = sigma u`, by deterministic power iteration on
/// `A^dagger A`.
pub fn dominant_singular_pair(a: &[C64], rows: usize, cols: usize) -> (f64, Vec<C64>, Vec<C64>) {
    assert_eq!(a.len(), rows * cols);
    let matvec = |v: &[C64]| -> Vec<C64> {
        (0..rows)
            .map(|r| {
                let mut acc = C64::new(0.0, 0.0);
                for c in 0..cols {
                    acc += a[r * cols + c] * v[c];
                }
                acc
            })
            .collect()
    };
    let adjvec = |u: &[C64]| -> Vec<C64> {
        (0..cols)
            .map(|c| {
                let mut acc = C64::new(0.0, 0.0);
                for r in 0..rows {
                    acc += a[r * cols + c].conj() * u[r];
                }
                acc
            })
            .collect()
    };
    let norm = |v: &[C64]| libm::sqrt(v.iter().map(|x| x.norm_sqr()).sum::<f64>());

    // deterministic start: the column with the largest norm
    let mut best = 0;
    let mut best_norm = -1.0;
    for c in 0..cols {
        let cn: f64 = (0..rows).map(|r| a[r * cols + c].norm_sqr()).sum();
        if cn > best_norm {
            best_norm = cn;
            best = c;
        }
    }
    let mut v = alloc::vec![C64::new(0.0, 0.0); cols];
    v[best] = C64::new(1.0, 0.0);
    let mut sigma = 0.0;
    for _ in 0..300 {
        let u = matvec(&v);
        let w = adjvec(&u);
        let wn = norm(&w);
        if wn == 0.0 {
            return (0.0, alloc::vec![C64::new(0.0, 0.0); rows], v);
        }
        for x in v.iter_mut().zip(&w) {
            *x.0 = x.1 / wn;
        }
        let new_sigma = libm::sqrt(wn);
        if libm::fabs(new_sigma - sigma) <= 1e-15 * new_sigma.max(1.0) {
            sigma = new_sigma;
            break;
        }
        sigma = new_sigma;
    }
    let mut u = matvec(&v);
    let un = norm(&u);
    if un > 0.0 {
        for x in u.iter_mut() {
            *x /= un;
        }
    }
    (un, u, v)
}
