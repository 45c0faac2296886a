//! The Zadeh transform `F(z) = sum_n z^n Z^n F_[n]`.
//!
//! Upper operators may be evaluated anywhere in the closed unit disk.
//! Operators with lower diagonals are only evaluated on the unit circle,
//! where the bilateral series makes sense and `F(e^{it})` is the conjugate
//! of `F` by the unitary diagonal `Lambda(e^{it}) = diag(e^{-ikt})`.

use num_complex::Complex64;

use crate::algebra::{multiply, sub, wiener_norm};
use crate::dense_oracle::{render, CMatrix, DenseTruncation};
use crate::diag_core::NSOperator;
use crate::error::{Result, WienerError};

/// Slack on `|z| = 1` when deciding whether a point lies on the circle.
pub const CIRCLE_TOL: f64 = 1e-12;

/// Relative roundoff allowance in [`RadialBound::holds`]. The two sides agree
/// analytically diagonal by diagonal.
pub const RADIAL_ROUNDOFF: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct ZadehEvaluation {
    pub z: Complex64,
    /// `F(z)`, stored with its diagonals scaled by `z^n`.
    pub result: NSOperator,
    /// Dense rendering of `result` over its hull.
    pub dense: DenseTruncation,
}

pub fn zadeh_eval(f: &NSOperator, z: Complex64) -> Result<ZadehEvaluation> {
    let modulus = z.norm();
    if modulus > 1.0 + CIRCLE_TOL {
        return Err(WienerError::OutsideDisk { modulus });
    }
    if !f.is_upper() && (modulus - 1.0).abs() > CIRCLE_TOL {
        return Err(WienerError::BilateralOffCircle { modulus });
    }
    let result = scale_diagonals(f, z);
    let dense = render(&result, result.hull())?;
    Ok(ZadehEvaluation { z, result, dense })
}

fn scale_diagonals(f: &NSOperator, z: Complex64) -> NSOperator {
    let scaled = f.diagonals().map(|(n, d)| (n, d.scale(z.powi(n as i32))));
    NSOperator::from_parts(f.block_size(), f.window(), f.exact_interior(), scaled)
}

/// Largest entrywise gap between `(U1 U2)(z)` and `U1(z) U2(z)`. Products of
/// finitely supported operators are exact, so every stored entry is compared,
/// not only the exact interior.
pub fn zadeh_multiplicativity_check(u1: &NSOperator, u2: &NSOperator, z: Complex64) -> Result<f64> {
    let lhs = zadeh_eval(&multiply(u1, u2)?, z)?.result;
    let rhs = multiply(&zadeh_eval(u1, z)?.result, &zadeh_eval(u2, z)?.result)?;
    Ok(lhs.max_abs_diff(&rhs))
}

/// The diagonal unitary `Lambda(e^{it})` over `n` consecutive indices from
/// `lo`: entry `e^{-ikt}` at index `k`, repeated over each block.
fn lambda_matrix(lo: i64, len: usize, m: usize, t: f64) -> CMatrix {
    CMatrix::from_fn(len * m, len * m, |r, c| {
        if r == c {
            let k = lo + (r / m) as i64;
            Complex64::from_polar(1.0, -(k as f64) * t)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Largest entrywise gap between `Lambda F Lambda^{-1}` and `F(e^{it})`, both
/// rendered over the hull of `F`.
pub fn lambda_conjugation_check(f: &NSOperator, t: f64) -> Result<f64> {
    let hull = f.hull();
    let m = f.block_size();
    let dense = render(f, hull)?;
    let lambda = lambda_matrix(hull.lo(), hull.len(), m, t);
    let lambda_inv = lambda.adjoint();
    let conjugated = lambda.matmul(dense.data())?.matmul(&lambda_inv)?;
    let evaluated = render(&zadeh_eval(f, Complex64::from_polar(1.0, t))?.result, hull)?;
    Ok(conjugated.max_abs_diff(evaluated.data()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialBound {
    /// `|U(r e^{it}) - U(e^{it})|` in Wiener norm.
    pub actual: f64,
    /// `sum_n (1 - r^n) |U_[n]|`.
    pub bound: f64,
}

impl RadialBound {
    pub fn holds(&self) -> bool {
        self.actual <= self.bound * (1.0 + RADIAL_ROUNDOFF) + f64::MIN_POSITIVE
    }
}

/// How far `U(r e^{it})` is from its boundary value, with the a priori bound.
pub fn radial_limit_bound(u: &NSOperator, r: f64, t: f64) -> Result<RadialBound> {
    u.require_upper()?;
    if !(r > 0.0 && r < 1.0) {
        return Err(WienerError::OutOfRange {
            name: "r",
            value: r,
        });
    }
    let inner = zadeh_eval(u, Complex64::from_polar(r, t))?.result;
    let boundary = zadeh_eval(u, Complex64::from_polar(1.0, t))?.result;
    let actual = wiener_norm(&sub(&inner, &boundary)?);
    let bound = u
        .diagonals()
        .map(|(n, d)| (1.0 - r.powi(n as i32)) * d.norm())
        .sum();
    Ok(RadialBound { actual, bound })
}
