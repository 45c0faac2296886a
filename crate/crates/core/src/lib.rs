//! Operators in the non-stationary Wiener algebra.
//!
//! An operator on `l2(Z; C^m)` is stored through its diagonal expansion
//! `F = sum_n Z^n F_[n]`, where `Z` is the bilateral backward shift and each
//! `F_[n]` is block diagonal. Finitely many diagonals over a finite window of
//! columns are kept, which makes products, adjoints and the Zadeh transform
//! exact. On top of that algebra the crate computes spectral factorizations
//! `W = W+* W+` with `W+` and its inverse upper triangular and summable.

// `!(x > 0.0)` is deliberate: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod dense_oracle;
pub mod diag_core;
pub mod error;
pub mod factorization;
pub mod random;
pub mod zadeh;

pub use algebra::NormReport;
pub use dense_oracle::{CMatrix, DenseTruncation};
pub use diag_core::{Block, Diagonal, IndexWindow, NSOperator};
pub use error::{Result, WienerError};
pub use factorization::{
    CayleyReport, FactorOptions, FactorizationReport, TriangularInverse, Verification,
    VerifyOptions,
};
pub use zadeh::{RadialBound, ZadehEvaluation};
