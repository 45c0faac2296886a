use num_complex::Complex64;

use super::{Block, IndexWindow};
use crate::error::{Result, WienerError};

/// A block-diagonal operator `D` with `D_ii = blocks[i - lo]` for `i` in the
/// window and zero elsewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagonal {
    window: IndexWindow,
    blocks: Vec<Block>,
}

impl Diagonal {
    pub fn new(window: IndexWindow, blocks: Vec<Block>) -> Result<Self> {
        if blocks.len() != window.len() {
            return Err(WienerError::DiagonalLength {
                offset: 0,
                expected: window.len(),
                found: blocks.len(),
            });
        }
        if let Some(first) = blocks.first() {
            let m = first.size();
            if let Some(bad) = blocks.iter().find(|b| b.size() != m) {
                return Err(WienerError::BlockSizeMismatch {
                    left: m,
                    right: bad.size(),
                });
            }
        }
        Ok(Self { window, blocks })
    }

    pub fn from_fn(window: IndexWindow, f: impl FnMut(i64) -> Block) -> Self {
        Self {
            window,
            blocks: window.iter().map(f).collect(),
        }
    }

    pub fn zeros(m: usize, window: IndexWindow) -> Self {
        Self::from_fn(window, |_| Block::zeros(m))
    }

    pub fn constant(window: IndexWindow, block: &Block) -> Self {
        Self::from_fn(window, |_| block.clone())
    }

    pub fn window(&self) -> IndexWindow {
        self.window
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn block_size(&self) -> usize {
        self.blocks[0].size()
    }

    /// The block at column `i`, or `None` outside the window.
    pub fn get(&self, i: i64) -> Option<&Block> {
        self.window.offset_of(i).map(|k| &self.blocks[k])
    }

    pub fn get_mut(&mut self, i: i64) -> Option<&mut Block> {
        self.window.offset_of(i).map(move |k| &mut self.blocks[k])
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &Block)> {
        self.window.iter().zip(&self.blocks)
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.iter().all(Block::is_zero)
    }

    /// `D^(j) = Z*^j D Z^j`: the block at column `i` moves to column `i + j`.
    pub fn shift(&self, j: i64) -> Diagonal {
        Diagonal {
            window: self.window.shift(j),
            blocks: self.blocks.clone(),
        }
    }

    /// Blockwise conjugate transpose (the adjoint of a diagonal operator).
    pub fn adjoint(&self) -> Diagonal {
        Diagonal {
            window: self.window,
            blocks: self.blocks.iter().map(Block::adjoint).collect(),
        }
    }

    pub fn scale(&self, c: Complex64) -> Diagonal {
        Diagonal {
            window: self.window,
            blocks: self.blocks.iter().map(|b| b.scale(c)).collect(),
        }
    }

    pub fn map(&self, f: impl FnMut(&Block) -> Block) -> Diagonal {
        Diagonal {
            window: self.window,
            blocks: self.blocks.iter().map(f).collect(),
        }
    }

    /// Product of diagonal operators, supported on the window intersection.
    pub fn mul(&self, rhs: &Diagonal) -> Option<Diagonal> {
        let w = self.window.intersect(&rhs.window)?;
        Some(Diagonal::from_fn(w, |i| {
            self.get(i).unwrap().matmul(rhs.get(i).unwrap())
        }))
    }

    /// The same operator stored on another window: cropped, zero-extended.
    pub fn rewindow(&self, window: IndexWindow) -> Diagonal {
        let m = self.block_size();
        Diagonal::from_fn(window, |i| {
            self.get(i).cloned().unwrap_or_else(|| Block::zeros(m))
        })
    }

    /// Operator norm of the diagonal operator: the largest block norm.
    pub fn norm(&self) -> f64 {
        self.blocks
            .iter()
            .map(Block::spectral_norm)
            .fold(0.0, f64::max)
    }

    /// Squared Hilbert-Schmidt norm.
    pub fn hilbert_schmidt_sq(&self) -> f64 {
        self.blocks.iter().map(Block::frobenius_sq).sum()
    }
}
