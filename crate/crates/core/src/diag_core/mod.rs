//! Index conventions and the finite-support diagonal-expansion operator type.
//!
//! The coefficient space is `C^m` and the bilateral backward shift is
//! `(Z f)_i = f_{i+1}`, so `Z` has identity blocks on the first
//! superdiagonal. An operator is stored through its diagonals,
//! `F = sum_n Z^n F_[n]` with `(F_[n])_ii = F_{i-n,i}`.

mod block;
mod diagonal;
mod operator;
mod window;

pub use block::Block;
pub use diagonal::Diagonal;
pub use operator::NSOperator;
pub use window::IndexWindow;
