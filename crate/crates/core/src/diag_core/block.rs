use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A square `m x m` complex matrix, one element of the coefficient space
/// `L(C^m)`. Stored row-major.
#[derive(Clone, PartialEq)]
pub struct Block {
    m: usize,
    data: Vec<Complex64>,
}

impl Block {
    pub fn zeros(m: usize) -> Self {
        Self {
            m,
            data: vec![ZERO; m * m],
        }
    }

    pub fn identity(m: usize) -> Self {
        let mut b = Self::zeros(m);
        for i in 0..m {
            b.data[i * m + i] = ONE;
        }
        b
    }

    /// `c * I_m`.
    pub fn scalar(m: usize, c: Complex64) -> Self {
        Self::identity(m).scale(c)
    }

    /// Builds a block from row-major entries. Panics if `data.len() != m * m`.
    pub fn from_row_major(m: usize, data: Vec<Complex64>) -> Self {
        assert_eq!(data.len(), m * m, "block data must have m*m entries");
        Self { m, data }
    }

    pub fn from_fn(m: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(m * m);
        for r in 0..m {
            for c in 0..m {
                data.push(f(r, c));
            }
        }
        Self { m, data }
    }

    pub fn size(&self) -> usize {
        self.m
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.m + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Complex64) {
        self.data[r * self.m + c] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            m: self.m,
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(Complex64::new(c, 0.0))
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.m, |r, c| self.get(c, r).conj())
    }

    pub fn matmul(&self, rhs: &Block) -> Self {
        debug_assert_eq!(self.m, rhs.m);
        let m = self.m;
        let mut out = vec![ZERO; m * m];
        for r in 0..m {
            for k in 0..m {
                let a = self.data[r * m + k];
                if a == ZERO {
                    continue;
                }
                for c in 0..m {
                    out[r * m + c] += a * rhs.data[k * m + c];
                }
            }
        }
        Self { m, data: out }
    }

    /// `self += a * b`, the inner kernel of every diagonal convolution.
    pub fn add_product(&mut self, a: &Block, b: &Block) {
        let m = self.m;
        for r in 0..m {
            for k in 0..m {
                let x = a.data[r * m + k];
                if x == ZERO {
                    continue;
                }
                for c in 0..m {
                    self.data[r * m + c] += x * b.data[k * m + c];
                }
            }
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Block) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Largest singular value. Closed forms for `m <= 2`, power iteration on
    /// `B* B` otherwise.
    pub fn spectral_norm(&self) -> f64 {
        match self.m {
            1 => self.data[0].norm(),
            2 => {
                let f = self.frobenius_sq();
                let det = self.data[0] * self.data[3] - self.data[1] * self.data[2];
                let disc = (f * f - 4.0 * det.norm_sqr()).max(0.0);
                ((f + disc.sqrt()) / 2.0).max(0.0).sqrt()
            }
            _ => self.spectral_norm_power(),
        }
    }

    fn spectral_norm_power(&self) -> f64 {
        let m = self.m;
        let gram = self.adjoint().matmul(self);
        // Start from the heaviest column of B*B: one power step from the best unit vector.
        let start = (0..m)
            .max_by(|&a, &b| {
                let na: f64 = (0..m).map(|r| gram.get(r, a).norm_sqr()).sum();
                let nb: f64 = (0..m).map(|r| gram.get(r, b).norm_sqr()).sum();
                na.total_cmp(&nb)
            })
            .unwrap_or(0);
        let mut v: Vec<Complex64> = (0..m).map(|r| gram.get(r, start)).collect();
        let mut lambda = 0.0;
        for _ in 0..500 {
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm == 0.0 {
                return 0.0;
            }
            v.iter_mut().for_each(|z| *z /= norm);
            let w: Vec<Complex64> = (0..m)
                .map(|r| (0..m).map(|c| gram.get(r, c) * v[c]).sum())
                .collect();
            let next: f64 = v.iter().zip(&w).map(|(a, b)| (a.conj() * b).re).sum();
            let done = (next - lambda).abs() <= 1e-15 * next.abs();
            lambda = next;
            v = w;
            if done {
                break;
            }
        }
        lambda.max(0.0).sqrt()
    }

    /// Inverse by Gauss-Jordan elimination with partial pivoting; `None` when a
    /// pivot falls below `1e-14` times the largest entry.
    pub fn inverse(&self) -> Option<Self> {
        let m = self.m;
        let scale = self.max_abs();
        if scale == 0.0 || !scale.is_finite() {
            return None;
        }
        let mut a = self.data.clone();
        let mut inv = Self::identity(m).data;
        for col in 0..m {
            let pivot = (col..m)
                .max_by(|&x, &y| a[x * m + col].norm().total_cmp(&a[y * m + col].norm()))
                .unwrap();
            if a[pivot * m + col].norm() <= 1e-14 * scale {
                return None;
            }
            if pivot != col {
                for c in 0..m {
                    a.swap(pivot * m + c, col * m + c);
                    inv.swap(pivot * m + c, col * m + c);
                }
            }
            let p = a[col * m + col];
            for c in 0..m {
                a[col * m + c] /= p;
                inv[col * m + c] /= p;
            }
            for r in 0..m {
                if r == col {
                    continue;
                }
                let f = a[r * m + col];
                if f == ZERO {
                    continue;
                }
                for c in 0..m {
                    let (ac, ic) = (a[col * m + c], inv[col * m + c]);
                    a[r * m + c] -= f * ac;
                    inv[r * m + c] -= f * ic;
                }
            }
        }
        Some(Self { m, data: inv })
    }

    /// Upper Cholesky factor `R` (positive real diagonal) with `R* R = self`.
    /// Reads only the upper triangle. `None` if a pivot is not positive.
    pub fn cholesky_upper(&self) -> Option<Self> {
        let m = self.m;
        let mut r = Self::zeros(m);
        for k in 0..m {
            let mut d = self.get(k, k).re;
            for j in 0..k {
                d -= r.get(j, k).norm_sqr();
            }
            if !(d > 0.0) {
                return None;
            }
            let dk = d.sqrt();
            r.set(k, k, Complex64::new(dk, 0.0));
            for l in k + 1..m {
                let mut s = self.get(k, l);
                for j in 0..k {
                    s -= r.get(j, k).conj() * r.get(j, l);
                }
                r.set(k, l, s / dk);
            }
        }
        Some(r)
    }

    /// Smallest singular value of a block, via the largest singular value of
    /// its inverse. Zero for singular blocks.
    pub fn min_singular_value(&self) -> f64 {
        match self.inverse() {
            Some(inv) => {
                let n = inv.spectral_norm();
                if n > 0.0 {
                    1.0 / n
                } else {
                    0.0
                }
            }
            None => 0.0,
        }
    }
}

impl fmt::Debug for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut list = f.debug_list();
        for r in 0..self.m {
            list.entry(&&self.data[r * self.m..(r + 1) * self.m]);
        }
        list.finish()
    }
}

impl Add for &Block {
    type Output = Block;
    fn add(self, rhs: &Block) -> Block {
        debug_assert_eq!(self.m, rhs.m);
        Block {
            m: self.m,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &Block {
    type Output = Block;
    fn sub(self, rhs: &Block) -> Block {
        debug_assert_eq!(self.m, rhs.m);
        Block {
            m: self.m,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul for &Block {
    type Output = Block;
    fn mul(self, rhs: &Block) -> Block {
        self.matmul(rhs)
    }
}

impl Neg for &Block {
    type Output = Block;
    fn neg(self) -> Block {
        self.scale_real(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn spectral_norm_closed_forms() {
        let b = Block::from_row_major(1, vec![c(3.0, 4.0)]);
        assert_eq!(b.spectral_norm(), 5.0);

        // diag(2, 1) rotated: singular values are still 2 and 1
        let b = Block::from_row_major(2, vec![c(0.0, 0.0), c(2.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        assert!((b.spectral_norm() - 2.0).abs() < 1e-14);

        // [[1,1],[0,1]] has sigma_max = golden ratio
        let b = Block::from_row_major(2, vec![c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((b.spectral_norm() - phi).abs() < 1e-14);
    }

    #[test]
    fn spectral_norm_power_matches_diagonal() {
        let b = Block::from_fn(3, |r, cc| {
            if r == cc {
                c(r as f64 + 1.0, 0.0)
            } else {
                c(0.0, 0.0)
            }
        });
        assert!((b.spectral_norm() - 3.0).abs() < 1e-12);
        let j = Block::from_fn(3, |_, _| c(1.0, 0.0));
        assert!((j.spectral_norm() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn inverse_and_cholesky() {
        let a = Block::from_row_major(2, vec![c(2.0, 0.0), c(0.5, 0.5), c(0.5, -0.5), c(1.0, 0.0)]);
        let inv = a.inverse().unwrap();
        assert!((&a * &inv).max_abs_diff(&Block::identity(2)) < 1e-14);

        let r = a.cholesky_upper().unwrap();
        assert_eq!(r.get(1, 0), c(0.0, 0.0));
        assert!(r.get(0, 0).re > 0.0 && r.get(1, 1).re > 0.0);
        assert!((&r.adjoint() * &r).max_abs_diff(&a) < 1e-14);

        assert!(Block::zeros(2).inverse().is_none());
        assert!(Block::scalar(2, c(-1.0, 0.0)).cholesky_upper().is_none());
    }
}
