//! Seeded random operators for tests, benchmarks and acceptance runs.

use num_complex::Complex64;
use rand::Rng;

use crate::algebra::{adjoint, multiply};
use crate::diag_core::{Block, IndexWindow, NSOperator};

fn complex_unit<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

pub fn random_block<R: Rng + ?Sized>(rng: &mut R, m: usize) -> Block {
    Block::from_fn(m, |_, _| complex_unit(rng))
}

/// Operator with independent uniform entries in `[-1, 1] + i[-1, 1]` on the
/// given offsets.
pub fn random_operator<R: Rng + ?Sized>(
    rng: &mut R,
    m: usize,
    window: IndexWindow,
    offsets: impl IntoIterator<Item = i64>,
) -> NSOperator {
    NSOperator::from_fn(m, window, offsets, |_, _| random_block(rng, m))
        .expect("random blocks are finite")
}

/// A member of the round-trip family: an upper `U` and `W = U* U`.
#[derive(Debug, Clone)]
pub struct FactorSample {
    /// `U` on a generous window, stationary beyond its core.
    pub factor: NSOperator,
    /// `U* U` stored on the requested window; it is stationary beyond that
    /// window in every diagonal.
    pub gram: NSOperator,
    /// Total `sum_{n >= 1} |U_[n]|`.
    pub off_diagonal_mass: f64,
}

/// Draws `U = sum_{n=0..b} Z^n U_[n]` with random blocks on the core window
/// `[lo + b, hi - b]` of `window`, repeated past its edges. The main-diagonal
/// blocks are upper triangular with moduli of the diagonal entries in
/// `[0.8, 1.2]` and smallest singular value at least `0.5`; the off-diagonal
/// Wiener mass is drawn uniformly from `[0.05, max_mass]`.
pub fn factor_sample<R: Rng + ?Sized>(
    rng: &mut R,
    m: usize,
    b: i64,
    window: IndexWindow,
    max_mass: f64,
) -> FactorSample {
    let core = window.shrink(b).expect("window longer than the band");
    let gen = core.expand(3 * b).expect("expansion is non-empty");
    let main: Vec<Block> = core.iter().map(|_| main_block(rng, m)).collect();
    let mut off: Vec<Vec<Block>> = (1..=b)
        .map(|_| core.iter().map(|_| random_block(rng, m)).collect())
        .collect();
    let raw_mass: f64 = off
        .iter()
        .map(|d| d.iter().map(Block::spectral_norm).fold(0.0, f64::max))
        .sum();
    let mass = if b > 0 {
        rng.random_range(0.05..max_mass)
    } else {
        0.0
    };
    if raw_mass > 0.0 {
        let s = mass / raw_mass;
        for d in &mut off {
            for blk in d.iter_mut() {
                *blk = blk.scale_real(s);
            }
        }
    }
    let at = |i: i64| (i.clamp(core.lo(), core.hi()) - core.lo()) as usize;
    let factor = NSOperator::from_fn(m, gen, 0..=b, |n, i| {
        if n == 0 {
            main[at(i)].clone()
        } else {
            off[(n - 1) as usize][at(i)].clone()
        }
    })
    .expect("random blocks are finite");
    let gram = multiply(&adjoint(&factor), &factor)
        .expect("same block size")
        .rewindow(window)
        .with_exact_interior(Some(window));
    FactorSample {
        factor,
        gram,
        off_diagonal_mass: mass,
    }
}

fn main_block<R: Rng + ?Sized>(rng: &mut R, m: usize) -> Block {
    loop {
        let b = Block::from_fn(m, |r, c| {
            if r == c {
                Complex64::from_polar(
                    rng.random_range(0.8..1.2),
                    rng.random_range(0.0..std::f64::consts::TAU),
                )
            } else if r < c {
                complex_unit(rng).scale(0.3)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        if b.min_singular_value() >= 0.5 {
            return b;
        }
    }
}
