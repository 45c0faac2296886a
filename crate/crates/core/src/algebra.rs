//! Banach-algebra operations on finitely supported elements of the
//! non-stationary Wiener algebra.
//!
//! Products use the diagonal convolution law
//! `(FG)_[m] = sum_n F_[n]^(m-n) G_[m-n]`, adjoints the rule
//! `(F*)_[-n] = (F_[n]*)^(-n)`. Both are exact on finitely supported
//! operators; only the `exact` interior metadata shrinks.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::dense_oracle::{power_norm_estimate, DEFAULT_SEED};
use crate::diag_core::{Block, Diagonal, IndexWindow, NSOperator};
use crate::error::{Result, WienerError};

/// Tolerance on self-adjointness accepted by [`phi_of`], relative to the
/// largest entry.
pub const SELF_ADJOINT_TOL: f64 = 1e-12;

/// The three norms reported for an operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormReport {
    /// `sum_n |F_[n]|`, each diagonal measured in operator norm.
    pub wiener: f64,
    pub hilbert_schmidt: f64,
    /// Power-iteration estimate (a lower bound) of the operator norm of the
    /// dense rendering over the operator's hull.
    pub operator_norm_estimate: f64,
}

pub fn add(f: &NSOperator, g: &NSOperator) -> Result<NSOperator> {
    f.check_block_size(g)?;
    let window = f.window().hull(&g.window());
    let exact = match (f.exact_interior(), g.exact_interior()) {
        (Some(a), Some(b)) => a.intersect(&b),
        _ => None,
    };
    let mut out: BTreeMap<i64, Diagonal> = BTreeMap::new();
    for (n, d) in f.diagonals().chain(g.diagonals()) {
        let d = d.rewindow(window);
        match out.get_mut(&n) {
            Some(acc) => {
                *acc = Diagonal::from_fn(window, |i| acc.get(i).unwrap() + d.get(i).unwrap())
            }
            None => {
                out.insert(n, d);
            }
        }
    }
    Ok(NSOperator::from_parts(f.block_size(), window, exact, out))
}

pub fn sub(f: &NSOperator, g: &NSOperator) -> Result<NSOperator> {
    add(f, &g.scale(Complex64::new(-1.0, 0.0)))
}

/// Columns of `FG` that stay faithful: column `k` of `FG` mixes the columns
/// `k - p` of `F` for every `p` in the support of `G`.
fn product_exact(
    f: Option<IndexWindow>,
    g: Option<IndexWindow>,
    g_range: Option<(i64, i64)>,
) -> Option<IndexWindow> {
    let (f, g) = (f?, g?);
    match g_range {
        None => Some(g),
        Some((gmin, gmax)) => {
            let reach = IndexWindow::new(f.lo() + gmax, f.hi() + gmin).ok()?;
            reach.intersect(&g)
        }
    }
}

/// Columns of `F*` that stay faithful: column `c` of `F*` is row `c` of `F`.
fn adjoint_exact(f: Option<IndexWindow>, range: Option<(i64, i64)>) -> Option<IndexWindow> {
    let f = f?;
    match range {
        None => Some(f),
        Some((nmin, nmax)) => IndexWindow::new(f.lo() - nmin, f.hi() - nmax).ok(),
    }
}

/// `FG` through the diagonal convolution law, summing in ascending `n`.
/// The result lives on `G`'s column window.
pub fn multiply(f: &NSOperator, g: &NSOperator) -> Result<NSOperator> {
    f.check_block_size(g)?;
    let m = f.block_size();
    let window = g.window();
    let exact = product_exact(f.exact_interior(), g.exact_interior(), g.support_range());
    let (Some((fmin, fmax)), Some((gmin, gmax))) = (f.support_range(), g.support_range()) else {
        return Ok(NSOperator::from_parts(m, window, exact, []));
    };
    let mut out = Vec::new();
    for mm in fmin + gmin..=fmax + gmax {
        let mut acc = Diagonal::zeros(m, window);
        let mut touched = false;
        for (n, fd) in f.diagonals() {
            let p = mm - n;
            let Some(gd) = g.diagonal(p) else {
                continue;
            };
            let shifted = fd.shift(p);
            let Some(cols) = shifted.window().intersect(&window) else {
                continue;
            };
            for k in cols.iter() {
                acc.get_mut(k)
                    .unwrap()
                    .add_product(shifted.get(k).unwrap(), gd.get(k).unwrap());
            }
            touched = true;
        }
        if touched {
            out.push((mm, acc));
        }
    }
    Ok(NSOperator::from_parts(m, window, exact, out))
}

/// `F*` via `(F*)_[-n] = (F_[n]*)^(-n)`. The column window of the result is
/// the row range of `F`.
pub fn adjoint(f: &NSOperator) -> NSOperator {
    let m = f.block_size();
    let range = f.support_range();
    let window = match range {
        None => f.window(),
        Some((nmin, nmax)) => f
            .window()
            .adjust(nmax, -nmin)
            .expect("row range is non-empty"),
    };
    let exact = adjoint_exact(f.exact_interior(), range).and_then(|e| e.intersect(&window));
    NSOperator::from_parts(
        m,
        window,
        exact,
        f.diagonals().map(|(n, d)| (-n, d.adjoint().shift(-n))),
    )
}

/// `Re F = (F + F*) / 2`.
pub fn real_part(f: &NSOperator) -> NSOperator {
    add(f, &adjoint(f))
        .expect("adjoint shares the block size")
        .scale(Complex64::new(0.5, 0.0))
}

/// `Phi = W_[0] + 2 sum_{n>=1} Z^n W_[n]`, the upper triangular operator with
/// `Re Phi = W` for self-adjoint `W`.
pub fn phi_of(w: &NSOperator) -> Result<NSOperator> {
    let scale = w
        .diagonals()
        .flat_map(|(_, d)| d.blocks().iter().map(Block::max_abs))
        .fold(1.0, f64::max);
    let dev = w.self_adjoint_deviation();
    if dev > SELF_ADJOINT_TOL * scale {
        return Err(WienerError::NotSelfAdjoint { deviation: dev });
    }
    let two = Complex64::new(2.0, 0.0);
    Ok(NSOperator::from_parts(
        w.block_size(),
        w.window(),
        w.exact_interior(),
        w.diagonals().filter(|(n, _)| *n >= 0).map(|(n, d)| {
            if n == 0 {
                (n, d.clone())
            } else {
                (n, d.scale(two))
            }
        }),
    ))
}

pub fn wiener_norm(f: &NSOperator) -> f64 {
    f.diagonals().map(|(_, d)| d.norm()).sum()
}

pub fn hilbert_schmidt_norm(f: &NSOperator) -> f64 {
    f.diagonals()
        .map(|(_, d)| d.hilbert_schmidt_sq())
        .sum::<f64>()
        .sqrt()
}

pub fn norms(f: &NSOperator) -> NormReport {
    norms_with_seed(f, DEFAULT_SEED)
}

pub fn norms_with_seed(f: &NSOperator, seed: u64) -> NormReport {
    NormReport {
        wiener: wiener_norm(f),
        hilbert_schmidt: hilbert_schmidt_norm(f),
        operator_norm_estimate: operator_norm_estimate(f, seed),
    }
}

/// Power iteration on the hull of `f`, applying `f` and `f*` diagonal by
/// diagonal. Vectors are indexed like the dense rendering over the hull, so
/// the estimate agrees with the dense one up to rounding.
fn operator_norm_estimate(f: &NSOperator, seed: u64) -> f64 {
    let m = f.block_size();
    let hull = f.hull();
    let at = |i: i64| (i - hull.lo()) as usize * m;
    let apply = |x: &[Complex64], adjoint: bool| {
        let mut y = vec![Complex64::new(0.0, 0.0); x.len()];
        for (n, d) in f.diagonals() {
            for (i, b) in d.iter() {
                // entry at (row i - n, column i)
                let (src, dst) = if adjoint {
                    (at(i - n), at(i))
                } else {
                    (at(i), at(i - n))
                };
                for r in 0..m {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for c in 0..m {
                        acc += if adjoint {
                            b.get(c, r).conj() * x[src + c]
                        } else {
                            b.get(r, c) * x[src + c]
                        };
                    }
                    y[dst + r] += acc;
                }
            }
        }
        y
    };
    power_norm_estimate(
        hull.len() * m,
        seed,
        |v| apply(v, false),
        |w| apply(w, true),
    )
}

/// Diagonals of `Omega(r) = V(r e^{it})* U(r e^{it})` with the phase
/// `e^{imt}` stripped:
/// `Omega_[m](r) = sum_p r^(2p-m) (V_[p-m]*)^(m) U_[p]`, summed over
/// `p >= max(0, m)`. At `r = 1` this is `V* U`.
pub fn gram_diagonals(v: &NSOperator, u: &NSOperator, r: f64) -> Result<NSOperator> {
    v.check_block_size(u)?;
    v.require_upper()?;
    u.require_upper()?;
    if !(r > 0.0 && r <= 1.0) {
        return Err(WienerError::OutOfRange {
            name: "r",
            value: r,
        });
    }
    let m = u.block_size();
    let window = u.window();
    let exact = product_exact(
        adjoint_exact(v.exact_interior(), v.support_range()),
        u.exact_interior(),
        u.support_range(),
    );
    let (Some((_, vmax)), Some((_, umax))) = (v.support_range(), u.support_range()) else {
        return Ok(NSOperator::from_parts(m, window, exact, []));
    };
    let mut out = Vec::new();
    for mm in -vmax..=umax {
        let mut acc = Diagonal::zeros(m, window);
        for p in mm.max(0)..=umax {
            let (Some(vd), Some(ud)) = (v.diagonal(p - mm), u.diagonal(p)) else {
                continue;
            };
            let weight = Complex64::new(r.powi((2 * p - mm) as i32), 0.0);
            let left = vd.adjoint().shift(mm);
            let Some(cols) = left.window().intersect(&window) else {
                continue;
            };
            for k in cols.iter() {
                let lhs = left.get(k).unwrap().scale(weight);
                acc.get_mut(k)
                    .unwrap()
                    .add_product(&lhs, ud.get(k).unwrap());
            }
        }
        out.push((mm, acc));
    }
    Ok(NSOperator::from_parts(m, window, exact, out))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(lo: i64, hi: i64) -> IndexWindow {
        IndexWindow::new(lo, hi).unwrap()
    }

    fn val(op: &NSOperator, n: i64, i: i64) -> f64 {
        op.diagonal(n)
            .and_then(|d| d.get(i))
            .map(|b| b.get(0, 0).re)
            .unwrap_or(0.0)
    }

    #[test]
    fn shift_product_example() {
        let f = NSOperator::scalar(w(0, 2), &[(1, vec![1.0, 2.0, 3.0])]).unwrap();
        let g = NSOperator::scalar(w(0, 2), &[(1, vec![4.0, 5.0, 6.0])]).unwrap();
        let fg = multiply(&f, &g).unwrap();
        assert_eq!(fg.support(), vec![2]);
        assert_eq!(val(&fg, 2, 0), 0.0);
        assert_eq!(val(&fg, 2, 1), 5.0);
        assert_eq!(val(&fg, 2, 2), 12.0);
    }

    #[test]
    fn adjoint_example() {
        let f = NSOperator::scalar(w(0, 2), &[(1, vec![1.0, 2.0, 3.0])]).unwrap();
        let fs = adjoint(&f);
        assert_eq!(fs.support(), vec![-1]);
        assert_eq!(val(&fs, -1, -1), 1.0);
        assert_eq!(val(&fs, -1, 0), 2.0);
        assert_eq!(val(&fs, -1, 1), 3.0);
        assert_eq!(adjoint(&fs).max_abs_diff(&f), 0.0);
    }

    #[test]
    fn identity_laws() {
        let win = w(-3, 3);
        let id = NSOperator::identity(1, win).unwrap();
        let f = NSOperator::scalar(win, &[(-1, vec![0.3; 7]), (2, vec![1.5; 7])]).unwrap();
        // A finite identity is the projection onto its window; on the hull of
        // F it fixes every entry, ghost rows included.
        let id_hull = NSOperator::identity(1, f.hull()).unwrap();
        assert_eq!(multiply(&id_hull, &f).unwrap().max_abs_diff(&f), 0.0);
        assert_eq!(multiply(&f, &id).unwrap().max_abs_diff(&f), 0.0);
        let projected = multiply(&id, &f).unwrap();
        assert!(projected.entry(-5, -3).is_zero());
        assert_eq!(projected.entry(-1, 1).get(0, 0).re, 1.5);
        let z = NSOperator::zero(1, win).unwrap();
        assert_eq!(add(&z, &f).unwrap(), f);
        assert!(sub(&f, &f).unwrap().is_zero());
        assert_eq!(adjoint(&id), id);
    }

    #[test]
    fn real_part_and_phi() {
        let win = w(0, 4);
        let i_id = NSOperator::identity(1, win)
            .unwrap()
            .scale(Complex64::new(0.0, 1.0));
        assert!(real_part(&i_id).is_zero());

        let wop = NSOperator::scalar(
            win,
            &[(-1, vec![0.5; 5]), (0, vec![1.25; 5]), (1, vec![0.5; 5])],
        )
        .unwrap();
        let phi = phi_of(&wop).unwrap();
        assert!(phi.is_upper());
        assert_eq!(val(&phi, 0, 2), 1.25);
        assert_eq!(val(&phi, 1, 2), 1.0);

        let not_sa = NSOperator::scalar(win, &[(1, vec![0.5; 5])]).unwrap();
        assert!(matches!(
            phi_of(&not_sa),
            Err(WienerError::NotSelfAdjoint { .. })
        ));
    }

    #[test]
    fn norm_examples() {
        let id = NSOperator::identity(1, w(0, 4)).unwrap();
        let r = norms(&id);
        assert_eq!(r.wiener, 1.0);
        assert!((r.hilbert_schmidt - 5f64.sqrt()).abs() < 1e-15);
        assert!((r.operator_norm_estimate - 1.0).abs() < 1e-12);

        let f = NSOperator::scalar(w(0, 4), &[(0, vec![1.0; 5]), (3, vec![0.5; 5])]).unwrap();
        assert_eq!(norms(&f).wiener, 1.5);
    }

    #[test]
    fn gram_identity_and_upper_check() {
        let id = NSOperator::identity(2, w(0, 3)).unwrap();
        for r in [0.2, 0.7, 1.0] {
            let g = gram_diagonals(&id, &id, r).unwrap();
            assert_eq!(g.max_abs_diff(&id), 0.0);
        }
        let lower = NSOperator::scalar(w(0, 3), &[(-1, vec![1.0; 4])]).unwrap();
        let id1 = NSOperator::identity(1, w(0, 3)).unwrap();
        assert!(gram_diagonals(&lower, &id1, 1.0).is_err());
        assert!(gram_diagonals(&id1, &id1, 0.0).is_err());
    }

    #[test]
    fn exact_interior_bookkeeping() {
        let win = w(0, 20);
        let t = NSOperator::scalar(
            win,
            &[(-2, vec![1.0; 21]), (0, vec![1.0; 21]), (1, vec![1.0; 21])],
        )
        .unwrap();
        let p = multiply(&t, &t).unwrap();
        assert_eq!(p.exact_interior(), Some(w(1, 18)));
        assert_eq!(adjoint(&t).exact_interior(), Some(w(2, 19)));
    }
}
