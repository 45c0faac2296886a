#![allow(dead_code)]

use nswiener_core::random::random_operator;
use nswiener_core::{IndexWindow, NSOperator};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn w(lo: i64, hi: i64) -> IndexWindow {
    IndexWindow::new(lo, hi).unwrap()
}

/// Shape of a random operator: block size, window and a contiguous band of
/// offsets, plus the seed that fills it.
#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub m: usize,
    pub lo: i64,
    pub len: i64,
    pub nmin: i64,
    pub width: i64,
    pub seed: u64,
}

impl Shape {
    pub fn window(&self) -> IndexWindow {
        w(self.lo, self.lo + self.len - 1)
    }

    pub fn build(&self) -> NSOperator {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        random_operator(
            &mut rng,
            self.m,
            self.window(),
            self.nmin..self.nmin + self.width,
        )
    }

    /// Same block size, an independent seed and band.
    pub fn sibling(&self, nmin: i64, width: i64, seed: u64) -> NSOperator {
        Shape {
            nmin,
            width,
            seed,
            ..*self
        }
        .build()
    }
}

pub fn shape(max_m: usize, max_len: i64, max_width: i64) -> impl Strategy<Value = Shape> {
    (
        1..=max_m,
        -5i64..5,
        1..=max_len,
        -3i64..=3,
        1..=max_width,
        any::<u64>(),
    )
        .prop_map(|(m, lo, len, nmin, width, seed)| Shape {
            m,
            lo,
            len,
            nmin,
            width,
            seed,
        })
}

pub fn upper_shape(max_m: usize, max_len: i64, max_width: i64) -> impl Strategy<Value = Shape> {
    shape(max_m, max_len, max_width).prop_map(|s| Shape { nmin: 0, ..s })
}
