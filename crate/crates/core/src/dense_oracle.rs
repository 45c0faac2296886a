//! Dense renderings of operators over a finite window, plus the brute-force
//! linear algebra that both the tests and the factorization engine rely on.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::diag_core::{Block, IndexWindow, NSOperator};
use crate::error::{Result, WienerError};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Pivot floor below which a Cholesky pivot counts as "not positive definite".
pub const DEFAULT_PD_FLOOR: f64 = 1e-10;

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut a = Self::zeros(n, n);
        for i in 0..n {
            a[(i, i)] = Complex64::new(1.0, 0.0);
        }
        a
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[Complex64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn matmul(&self, rhs: &CMatrix) -> Result<CMatrix> {
        if self.cols != rhs.rows {
            return Err(WienerError::DimensionMismatch {
                expected: self.cols,
                found: rhs.rows,
            });
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a == ZERO {
                    continue;
                }
                let src = rhs.row(k);
                let dst = &mut out.data[r * rhs.cols..(r + 1) * rhs.cols];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += a * s;
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(a, x)| a * x).sum())
            .collect()
    }

    /// `A* v` without forming the adjoint.
    pub fn adjoint_matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![ZERO; self.cols];
        for (r, x) in v.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.row(r)) {
                *o += a.conj() * x;
            }
        }
        out
    }

    pub fn zip_with(
        &self,
        rhs: &CMatrix,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        }
    }

    pub fn scale(&self, c: Complex64) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `max |A - A*|`; infinite for non-square input.
    pub fn hermitian_deviation(&self) -> f64 {
        if self.rows != self.cols {
            return f64::INFINITY;
        }
        let mut dev: f64 = 0.0;
        for r in 0..self.rows {
            for c in r..self.cols {
                dev = dev.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        dev
    }

    /// Largest `c - r` with a nonzero entry above the diagonal.
    pub fn upper_bandwidth(&self) -> usize {
        let mut bw = 0;
        for r in 0..self.rows {
            for c in (r + bw + 1..self.cols).rev() {
                if self[(r, c)] != ZERO {
                    bw = c - r;
                    break;
                }
            }
        }
        bw
    }

    pub fn is_upper_triangular(&self) -> bool {
        (0..self.rows).all(|r| (0..r.min(self.cols)).all(|c| self[(r, c)] == ZERO))
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.cols + c]
    }
}

/// A square block matrix over an index window: the finite section of an
/// operator. Block `(i, j)` sits at rows `(i - lo) m ..` and columns
/// `(j - lo) m ..`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseTruncation {
    window: IndexWindow,
    m: usize,
    data: CMatrix,
    exact_interior: Option<IndexWindow>,
}

impl DenseTruncation {
    pub fn new(window: IndexWindow, m: usize, data: CMatrix) -> Result<Self> {
        let n = window.len() * m;
        if data.rows() != n || data.cols() != n {
            return Err(WienerError::DimensionMismatch {
                expected: n,
                found: data.rows(),
            });
        }
        Ok(Self {
            window,
            m,
            data,
            exact_interior: Some(window),
        })
    }

    pub fn window(&self) -> IndexWindow {
        self.window
    }

    pub fn block_size(&self) -> usize {
        self.m
    }

    pub fn data(&self) -> &CMatrix {
        &self.data
    }

    pub fn into_data(self) -> CMatrix {
        self.data
    }

    pub fn exact_interior(&self) -> Option<IndexWindow> {
        self.exact_interior
    }

    pub fn with_exact_interior(mut self, interior: Option<IndexWindow>) -> Self {
        self.exact_interior = interior.and_then(|i| i.intersect(&self.window));
        self
    }

    pub fn dim(&self) -> usize {
        self.data.rows()
    }

    /// The `(i, j)` block, for `i, j` inside the window.
    pub fn block(&self, i: i64, j: i64) -> Option<Block> {
        let r = self.window.offset_of(i)? * self.m;
        let c = self.window.offset_of(j)? * self.m;
        Some(Block::from_fn(self.m, |a, b| self.data[(r + a, c + b)]))
    }

    /// Largest `|j - i|` over nonzero blocks.
    pub fn block_bandwidth(&self) -> i64 {
        let m = self.m;
        let mut bw = 0usize;
        for r in 0..self.dim() {
            for c in 0..self.dim() {
                if self.data[(r, c)] != ZERO {
                    bw = bw.max((r / m).abs_diff(c / m));
                }
            }
        }
        bw as i64
    }

    pub fn map_data(&self, f: impl FnOnce(&CMatrix) -> CMatrix) -> DenseTruncation {
        DenseTruncation {
            window: self.window,
            m: self.m,
            data: f(&self.data),
            exact_interior: self.exact_interior,
        }
    }

    pub fn adjoint(&self) -> DenseTruncation {
        self.map_data(CMatrix::adjoint)
    }

    /// `(A + A*) / 2`.
    pub fn hermitian_part(&self) -> DenseTruncation {
        let half = Complex64::new(0.5, 0.0);
        self.map_data(|a| a.zip_with(&a.adjoint(), |x, y| (x + y) * half))
    }

    /// Product of two sections over the same window. Entries lose exactness
    /// within the left factor's bandwidth of the boundary, where the true
    /// product would reach indices outside the window.
    pub fn matmul(&self, rhs: &DenseTruncation) -> Result<DenseTruncation> {
        if self.window != rhs.window || self.m != rhs.m {
            return Err(WienerError::DimensionMismatch {
                expected: self.dim(),
                found: rhs.dim(),
            });
        }
        let interior = match (self.exact_interior, rhs.exact_interior) {
            (Some(a), Some(b)) => a
                .intersect(&b)
                .and_then(|w| w.shrink(self.block_bandwidth())),
            _ => None,
        };
        Ok(DenseTruncation {
            window: self.window,
            m: self.m,
            data: self.data.matmul(&rhs.data)?,
            exact_interior: interior,
        })
    }

    /// Largest entrywise difference over blocks `(i, j)` with both indices in
    /// `interior`.
    pub fn max_abs_diff_on(&self, other: &DenseTruncation, interior: IndexWindow) -> f64 {
        let Some(inner) = interior.intersect(&self.window) else {
            return 0.0;
        };
        let m = self.m;
        let start = (inner.lo() - self.window.lo()) as usize * m;
        let end = start + inner.len() * m;
        let mut diff: f64 = 0.0;
        for r in start..end {
            for c in start..end {
                diff = diff.max((self.data[(r, c)] - other.data[(r, c)]).norm());
            }
        }
        diff
    }
}

/// Dense image of `F` on `window`. The window must cover the operator's
/// column window; entries in ghost rows above the window are not part of the
/// section.
pub fn render(f: &NSOperator, window: IndexWindow) -> Result<DenseTruncation> {
    if !window.contains_window(&f.window()) {
        return Err(WienerError::WindowTooSmall {
            window,
            required: f.window(),
        });
    }
    let m = f.block_size();
    let mut data = CMatrix::zeros(window.len() * m, window.len() * m);
    for (n, d) in f.diagonals() {
        for (col, b) in d.iter() {
            let Some(r) = window.offset_of(col - n) else {
                continue;
            };
            let c = window.offset_of(col).unwrap();
            for a in 0..m {
                for bb in 0..m {
                    data[(r * m + a, c * m + bb)] = b.get(a, bb);
                }
            }
        }
    }
    DenseTruncation::new(window, m, data)
}

/// Reads the diagonals back off a section: diagonal `n` at column `i` is the
/// block at `(i - n, i)`.
pub fn extract_diagonals(t: &DenseTruncation) -> NSOperator {
    let window = t.window();
    let len = window.len() as i64;
    let m = t.block_size();
    let diags: Vec<(i64, Vec<Block>)> = (-(len - 1)..len)
        .map(|n| {
            let blocks = window
                .iter()
                .map(|i| t.block(i - n, i).unwrap_or_else(|| Block::zeros(m)))
                .collect();
            (n, blocks)
        })
        .collect();
    NSOperator::from_diagonals(m, window, diags)
        .expect("section blocks are consistent")
        .with_exact_interior(t.exact_interior())
}

/// Upper Cholesky factor `R` (positive diagonal) with `R* R = T`, pivot floor
/// [`DEFAULT_PD_FLOOR`].
pub fn cholesky_upper(t: &DenseTruncation) -> Result<DenseTruncation> {
    cholesky_upper_with(t, DEFAULT_PD_FLOOR)
}

pub fn cholesky_upper_with(t: &DenseTruncation, pd_floor: f64) -> Result<DenseTruncation> {
    let scale = t.data().max_abs().max(1.0);
    let dev = t.data().hermitian_deviation();
    if dev > 1e-10 * scale {
        return Err(WienerError::NotHermitian { deviation: dev });
    }
    let r = cholesky_upper_shifted(t.data(), 0.0, pd_floor)?;
    Ok(t.map_data(|_| r))
}

/// Banded upper Cholesky of `A - shift I`, reading only the upper triangle.
/// Work and writes stay inside the upper bandwidth of `A`.
pub fn cholesky_upper_shifted(a: &CMatrix, shift: f64, pd_floor: f64) -> Result<CMatrix> {
    let n = a.rows();
    let bw = a.upper_bandwidth();
    let mut r = CMatrix::zeros(n, n);
    for k in 0..n {
        let mut d = a[(k, k)].re - shift;
        for j in k.saturating_sub(bw)..k {
            d -= r[(j, k)].norm_sqr();
        }
        if !(d > pd_floor) {
            return Err(WienerError::NotPositiveDefinite { pivot: k, value: d });
        }
        let dk = d.sqrt();
        r[(k, k)] = Complex64::new(dk, 0.0);
        for l in k + 1..n.min(k + bw + 1) {
            let mut s = a[(k, l)];
            for j in l.saturating_sub(bw)..k {
                s -= r[(j, k)].conj() * r[(j, l)];
            }
            r[(k, l)] = s / dk;
        }
    }
    Ok(r)
}

/// Solves `R X = B` for block upper triangular `R` by block back substitution.
pub fn triangular_solve_upper(r: &DenseTruncation, b: &CMatrix) -> Result<CMatrix> {
    let n = r.dim();
    if b.rows() != n {
        return Err(WienerError::DimensionMismatch {
            expected: n,
            found: b.rows(),
        });
    }
    let m = r.block_size();
    let nb = r.window().len();
    let bw = r.block_bandwidth() as usize;
    let k = b.cols();
    let mut x = CMatrix::zeros(n, k);
    for bi in (0..nb).rev() {
        let rows = bi * m..(bi + 1) * m;
        let mut rhs: Vec<Complex64> = rows.clone().flat_map(|i| b.row(i).to_vec()).collect();
        for bj in bi + 1..nb.min(bi + bw + 1) {
            for a in 0..m {
                for c in 0..m {
                    let coef = r.data()[(bi * m + a, bj * m + c)];
                    if coef == ZERO {
                        continue;
                    }
                    let xr = x.row(bj * m + c);
                    for (t, xv) in rhs[a * k..(a + 1) * k].iter_mut().zip(xr) {
                        *t -= coef * xv;
                    }
                }
            }
        }
        let diag = Block::from_fn(m, |a, c| r.data()[(bi * m + a, bi * m + c)]);
        let inv = diag.inverse().ok_or(WienerError::SingularBlock {
            index: r.window().lo() + bi as i64,
        })?;
        for a in 0..m {
            for col in 0..k {
                let v: Complex64 = (0..m).map(|c| inv.get(a, c) * rhs[c * k + col]).sum();
                x[(bi * m + a, col)] = v;
            }
        }
    }
    Ok(x)
}

/// Lower bound on the smallest eigenvalue of a Hermitian section: the largest
/// shift `lambda` (to within `tol`) for which `T - lambda I` still admits a
/// Cholesky factorization. Bisection starts from the Gershgorin bound, which
/// is itself a valid certificate.
pub fn min_eig_lower_bound(t: &DenseTruncation, tol: f64) -> Result<f64> {
    min_eig_lower_bound_matrix(t.data(), tol)
}

pub fn min_eig_lower_bound_matrix(a: &CMatrix, tol: f64) -> Result<f64> {
    let scale = a.max_abs().max(1.0);
    let dev = a.hermitian_deviation();
    if dev > 1e-10 * scale {
        return Err(WienerError::NotHermitian { deviation: dev });
    }
    if !(tol > 0.0) {
        return Err(WienerError::OutOfRange {
            name: "tol",
            value: tol,
        });
    }
    let n = a.rows();
    let mut lo = f64::INFINITY;
    let mut hi = f64::INFINITY;
    for i in 0..n {
        let off: f64 = (0..n).filter(|&j| j != i).map(|j| a[(i, j)].norm()).sum();
        lo = lo.min(a[(i, i)].re - off);
        hi = hi.min(a[(i, i)].re);
    }
    if n == 0 {
        return Ok(0.0);
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if cholesky_upper_shifted(a, mid, 0.0).is_ok() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Default seed of the power iteration used for operator norm estimates.
pub const DEFAULT_SEED: u64 = 0x5eed_2004;

/// Estimate of the largest singular value by power iteration on `A* A` from a
/// seeded random start. Every iterate `|A v|` with `|v| = 1` is a lower bound
/// of the true norm; the largest one is returned.
pub fn spectral_norm_estimate(a: &CMatrix, seed: u64) -> f64 {
    if a.rows() == 0 {
        return 0.0;
    }
    power_norm_estimate(a.cols(), seed, |v| a.matvec(v), |w| a.adjoint_matvec(w))
}

/// Power iteration for an operator given only through its action `apply`
/// on vectors of length `n` and the action `apply_adjoint` of its adjoint.
pub fn power_norm_estimate(
    n: usize,
    seed: u64,
    apply: impl Fn(&[Complex64]) -> Vec<Complex64>,
    apply_adjoint: impl Fn(&[Complex64]) -> Vec<Complex64>,
) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    let mut best: f64 = 0.0;
    let mut prev = 0.0;
    for _ in 0..200 {
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            break;
        }
        v.iter_mut().for_each(|z| *z /= norm);
        let w = apply(&v);
        let sigma = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        best = best.max(sigma);
        if (sigma - prev).abs() <= 1e-12 * sigma {
            break;
        }
        prev = sigma;
        v = apply_adjoint(&w);
    }
    best
}
