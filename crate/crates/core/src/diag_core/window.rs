use std::fmt;

use crate::error::{Result, WienerError};

/// Inclusive range `[lo, hi]` of time indices in `Z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct IndexWindow {
    lo: i64,
    hi: i64,
}

impl IndexWindow {
    pub fn new(lo: i64, hi: i64) -> Result<Self> {
        if lo > hi {
            return Err(WienerError::InvalidWindow { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.hi
    }

    pub fn len(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    /// Windows are never empty; provided for clippy's `len_without_is_empty`.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, i: i64) -> bool {
        self.lo <= i && i <= self.hi
    }

    pub fn contains_window(&self, other: &IndexWindow) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// Position of `i` inside the window.
    pub fn offset_of(&self, i: i64) -> Option<usize> {
        self.contains(i).then(|| (i - self.lo) as usize)
    }

    pub fn intersect(&self, other: &IndexWindow) -> Option<IndexWindow> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(IndexWindow { lo, hi })
    }

    /// Smallest window containing both.
    pub fn hull(&self, other: &IndexWindow) -> IndexWindow {
        IndexWindow {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    pub fn shift(&self, j: i64) -> IndexWindow {
        IndexWindow {
            lo: self.lo + j,
            hi: self.hi + j,
        }
    }

    /// Grows by `left` on the low side and `right` on the high side; negative
    /// amounts shrink. `None` when nothing is left.
    pub fn adjust(&self, left: i64, right: i64) -> Option<IndexWindow> {
        let lo = self.lo - left;
        let hi = self.hi + right;
        (lo <= hi).then_some(IndexWindow { lo, hi })
    }

    pub fn expand(&self, k: i64) -> Option<IndexWindow> {
        self.adjust(k, k)
    }

    pub fn shrink(&self, k: i64) -> Option<IndexWindow> {
        self.adjust(-k, -k)
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = i64> + Clone {
        self.lo..=self.hi
    }
}

impl fmt::Display for IndexWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}
