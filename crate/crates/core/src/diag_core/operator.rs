use std::collections::BTreeMap;

use num_complex::Complex64;

use super::{Block, Diagonal, IndexWindow};
use crate::error::{Result, WienerError};

/// A finitely supported operator `F = sum_n Z^n F_[n]` on `l2(Z; C^m)`.
///
/// Every stored diagonal covers the same column window. The block entry of
/// `F` at `(i - n, i)` is `(F_[n])_ii`, so positive offsets sit above the main
/// diagonal. Rows are not clipped to the window: for `n > 0` the entries of
/// the first `n` columns live in rows below `lo` ("ghost rows"), and all
/// algebra treats them as genuine entries of the operator.
///
/// `exact` marks the columns on which the stored data is declared faithful to
/// the (usually infinite) operator being approximated. Constructors set it to
/// the full window; products and adjoints shrink it.
#[derive(Debug, Clone, PartialEq)]
pub struct NSOperator {
    m: usize,
    window: IndexWindow,
    exact: Option<IndexWindow>,
    diagonals: BTreeMap<i64, Diagonal>,
}

impl NSOperator {
    pub fn zero(m: usize, window: IndexWindow) -> Result<Self> {
        if m == 0 {
            return Err(WienerError::InvalidBlockSize);
        }
        Ok(Self {
            m,
            window,
            exact: Some(window),
            diagonals: BTreeMap::new(),
        })
    }

    pub fn identity(m: usize, window: IndexWindow) -> Result<Self> {
        let mut op = Self::zero(m, window)?;
        op.diagonals
            .insert(0, Diagonal::constant(window, &Block::identity(m)));
        Ok(op)
    }

    /// Builds an operator from `(offset, blocks)` pairs, one block per window
    /// column. All-zero diagonals are dropped.
    pub fn from_diagonals(
        m: usize,
        window: IndexWindow,
        diagonals: impl IntoIterator<Item = (i64, Vec<Block>)>,
    ) -> Result<Self> {
        let mut op = Self::zero(m, window)?;
        for (n, blocks) in diagonals {
            if blocks.len() != window.len() {
                return Err(WienerError::DiagonalLength {
                    offset: n,
                    expected: window.len(),
                    found: blocks.len(),
                });
            }
            for (i, b) in window.iter().zip(&blocks) {
                if b.size() != m {
                    return Err(WienerError::BlockSizeMismatch {
                        left: m,
                        right: b.size(),
                    });
                }
                if !b.is_finite() {
                    return Err(WienerError::NonFinite {
                        offset: n,
                        column: i,
                    });
                }
            }
            let d = Diagonal::new(window, blocks)?;
            if !d.is_zero() {
                op.diagonals.insert(n, d);
            }
        }
        Ok(op)
    }

    /// Builds an operator with `(F_[n])_ii = f(n, i)` for the given offsets.
    pub fn from_fn(
        m: usize,
        window: IndexWindow,
        offsets: impl IntoIterator<Item = i64>,
        mut f: impl FnMut(i64, i64) -> Block,
    ) -> Result<Self> {
        let diags: Vec<(i64, Vec<Block>)> = offsets
            .into_iter()
            .map(|n| (n, window.iter().map(|i| f(n, i)).collect()))
            .collect();
        Self::from_diagonals(m, window, diags)
    }

    /// Scalar (`m = 1`) convenience constructor: `values[n]` lists the diagonal
    /// entries over the window.
    pub fn scalar(window: IndexWindow, values: &[(i64, Vec<f64>)]) -> Result<Self> {
        Self::from_diagonals(
            1,
            window,
            values.iter().map(|(n, v)| {
                (
                    *n,
                    v.iter()
                        .map(|&x| Block::scalar(1, Complex64::new(x, 0.0)))
                        .collect(),
                )
            }),
        )
    }

    /// Assembles an operator from diagonals already stored on `window`.
    pub(crate) fn from_parts(
        m: usize,
        window: IndexWindow,
        exact: Option<IndexWindow>,
        diagonals: impl IntoIterator<Item = (i64, Diagonal)>,
    ) -> Self {
        let diagonals = diagonals
            .into_iter()
            .filter(|(_, d)| !d.is_zero())
            .map(|(n, d)| {
                let d = if d.window() == window {
                    d
                } else {
                    d.rewindow(window)
                };
                (n, d)
            })
            .collect();
        Self {
            m,
            window,
            exact,
            diagonals,
        }
    }

    pub fn block_size(&self) -> usize {
        self.m
    }

    pub fn window(&self) -> IndexWindow {
        self.window
    }

    pub fn exact_interior(&self) -> Option<IndexWindow> {
        self.exact
    }

    pub fn with_exact_interior(mut self, exact: Option<IndexWindow>) -> Self {
        self.exact = exact.and_then(|e| e.intersect(&self.window));
        self
    }

    /// Offsets of the nonzero diagonals, ascending.
    pub fn support(&self) -> Vec<i64> {
        self.diagonals.keys().copied().collect()
    }

    /// `(n_min, n_max)` of the support; `None` for the zero operator.
    pub fn support_range(&self) -> Option<(i64, i64)> {
        let lo = *self.diagonals.keys().next()?;
        let hi = *self.diagonals.keys().next_back()?;
        Some((lo, hi))
    }

    /// Largest `|n|` over the support.
    pub fn radius(&self) -> i64 {
        self.support_range()
            .map(|(lo, hi)| lo.abs().max(hi.abs()))
            .unwrap_or(0)
    }

    pub fn diagonal(&self, n: i64) -> Option<&Diagonal> {
        self.diagonals.get(&n)
    }

    pub fn diagonals(&self) -> impl Iterator<Item = (i64, &Diagonal)> {
        self.diagonals.iter().map(|(n, d)| (*n, d))
    }

    pub fn is_zero(&self) -> bool {
        self.diagonals.is_empty()
    }

    pub fn is_upper(&self) -> bool {
        self.support_range().is_none_or(|(lo, _)| lo >= 0)
    }

    pub fn is_lower(&self) -> bool {
        self.support_range().is_none_or(|(_, hi)| hi <= 0)
    }

    pub fn is_diagonal(&self) -> bool {
        self.is_upper() && self.is_lower()
    }

    pub(crate) fn require_upper(&self) -> Result<()> {
        match self.support_range() {
            Some((lo, _)) if lo < 0 => Err(WienerError::NotUpperTriangular { offset: lo }),
            _ => Ok(()),
        }
    }

    pub(crate) fn check_block_size(&self, other: &NSOperator) -> Result<()> {
        if self.m != other.m {
            return Err(WienerError::BlockSizeMismatch {
                left: self.m,
                right: other.m,
            });
        }
        Ok(())
    }

    /// The `(row, col)` block of `F`, i.e. `(F_[col-row])_{col,col}`; zero off
    /// the support or outside the window.
    pub fn entry(&self, row: i64, col: i64) -> Block {
        self.entry_ref(row, col)
            .cloned()
            .unwrap_or_else(|| Block::zeros(self.m))
    }

    pub(crate) fn entry_ref(&self, row: i64, col: i64) -> Option<&Block> {
        self.diagonals.get(&(col - row))?.get(col)
    }

    /// Smallest window holding every row and column index that carries a
    /// stored entry.
    pub fn hull(&self) -> IndexWindow {
        match self.support_range() {
            None => self.window,
            Some((nmin, nmax)) => {
                let rows_lo = self.window.lo() - nmax;
                let rows_hi = self.window.hi() - nmin;
                IndexWindow::new(rows_lo.min(self.window.lo()), rows_hi.max(self.window.hi()))
                    .expect("hull is non-empty")
            }
        }
    }

    /// `F^(j) = Z*^j F Z^j`: every entry moves by `j` along both indices.
    pub fn shift_conjugate(&self, j: i64) -> NSOperator {
        NSOperator {
            m: self.m,
            window: self.window.shift(j),
            exact: self.exact.map(|e| e.shift(j)),
            diagonals: self
                .diagonals
                .iter()
                .map(|(n, d)| (*n, d.shift(j)))
                .collect(),
        }
    }

    pub fn scale(&self, c: Complex64) -> NSOperator {
        NSOperator::from_parts(
            self.m,
            self.window,
            self.exact,
            self.diagonals.iter().map(|(n, d)| (*n, d.scale(c))),
        )
    }

    /// Same operator with diagonals stored on `window`: columns outside are
    /// dropped, new columns are zero.
    pub fn rewindow(&self, window: IndexWindow) -> NSOperator {
        NSOperator::from_parts(
            self.m,
            window,
            self.exact.and_then(|e| e.intersect(&window)),
            self.diagonals.iter().map(|(n, d)| (*n, d.rewindow(window))),
        )
    }

    /// `P F P` for the coordinate projection `P` onto `window`: keeps only
    /// entries whose row and column both lie in `window`.
    pub fn compress(&self, window: IndexWindow) -> NSOperator {
        let m = self.m;
        NSOperator::from_parts(
            m,
            window,
            self.exact.and_then(|e| e.intersect(&window)),
            self.diagonals.iter().map(|(n, d)| {
                (
                    *n,
                    Diagonal::from_fn(window, |i| match d.get(i) {
                        Some(b) if window.contains(i - n) => b.clone(),
                        _ => Block::zeros(m),
                    }),
                )
            }),
        )
    }

    /// Extends every diagonal to `window` by repeating its first and last
    /// block. Exact for operators that are stationary beyond the window.
    pub fn extend_clamped(&self, window: IndexWindow) -> Result<NSOperator> {
        if !window.contains_window(&self.window) {
            return Err(WienerError::WindowTooSmall {
                window,
                required: self.window,
            });
        }
        let (lo, hi) = (self.window.lo(), self.window.hi());
        Ok(NSOperator::from_parts(
            self.m,
            window,
            self.exact,
            self.diagonals.iter().map(|(n, d)| {
                (
                    *n,
                    Diagonal::from_fn(window, |i| d.get(i.clamp(lo, hi)).unwrap().clone()),
                )
            }),
        ))
    }

    /// Largest deviation `|F(i,k) - F(k,i)*|` over entries with both indices in
    /// the window, i.e. how far `P F P` is from Hermitian.
    pub fn self_adjoint_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for (n, d) in &self.diagonals {
            for (col, b) in d.iter() {
                let row = col - n;
                if !self.window.contains(row) {
                    continue;
                }
                let mirrored = self.entry_ref(col, row);
                let diff = match mirrored {
                    Some(t) => b.max_abs_diff(&t.adjoint()),
                    None => b.max_abs(),
                };
                dev = dev.max(diff);
            }
        }
        dev
    }

    /// Largest entrywise difference to `other`, over every stored entry of
    /// either operator (missing entries count as zero).
    pub fn max_abs_diff(&self, other: &NSOperator) -> f64 {
        let window = self.window.hull(&other.window);
        self.max_abs_diff_on(other, window)
    }

    /// Like [`max_abs_diff`](Self::max_abs_diff) but only over columns in `cols`.
    pub fn max_abs_diff_on(&self, other: &NSOperator, cols: IndexWindow) -> f64 {
        let mut offsets: Vec<i64> = self.support();
        offsets.extend(other.support());
        offsets.sort_unstable();
        offsets.dedup();
        let mut diff: f64 = 0.0;
        for n in offsets {
            let a = self.diagonals.get(&n);
            let b = other.diagonals.get(&n);
            for i in cols.iter() {
                let d = match (a.and_then(|d| d.get(i)), b.and_then(|d| d.get(i))) {
                    (Some(x), Some(y)) => x.max_abs_diff(y),
                    (Some(x), None) | (None, Some(x)) => x.max_abs(),
                    (None, None) => 0.0,
                };
                diff = diff.max(d);
            }
        }
        diff
    }
}
