//! Spectral factorization `W = W+* W+` by padded finite sections.
//!
//! The section of `W` on a padded window is factored by banded upper
//! Cholesky. Doing this for padding `P` and `2P` and keeping the columns on
//! which both runs agree gives the accepted window. Outside its window `W` is
//! continued by repeating the edge blocks of its upper diagonals (the lower
//! ones follow by self-adjointness), which is exact for operators that are
//! stationary beyond the window.

use num_complex::Complex64;

use crate::algebra::{add, adjoint, multiply, phi_of, sub, wiener_norm};
use crate::dense_oracle::{
    cholesky_upper_with, extract_diagonals, min_eig_lower_bound, min_eig_lower_bound_matrix,
    render, spectral_norm_estimate, triangular_solve_upper, CMatrix, DenseTruncation,
    DEFAULT_PD_FLOOR, DEFAULT_SEED,
};
use crate::diag_core::{Block, Diagonal, IndexWindow, NSOperator};
use crate::error::{Result, WienerError};
use crate::zadeh::zadeh_eval;

/// Self-adjointness slack, relative to the largest entry of `W`.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Bisection width for positivity certificates.
pub const CERTIFICATE_TOL: f64 = 1e-10;
pub const DEFAULT_STABILIZATION_TOL: f64 = 1e-6;
pub const DEFAULT_EPS_TAIL: f64 = 1e-10;
pub const DEFAULT_VERIFY_TOL: f64 = 1e-6;

/// Sample points of the disk at which `Re Phi(z)` is tested.
pub fn cayley_sample_points() -> [Complex64; 4] {
    [
        Complex64::new(0.0, 0.0),
        Complex64::new(0.5, 0.0),
        Complex64::from_polar(0.9, 1.2),
        Complex64::from_polar(1.0, 0.3),
    ]
}

/// Width `2b + 1` of a band with half-width `b`.
fn band_width(radius: i64) -> usize {
    (2 * radius + 1) as usize
}

pub fn default_pad(w: &NSOperator) -> usize {
    4 * band_width(w.radius())
}

pub fn default_max_offset(u: &NSOperator) -> usize {
    8 * band_width(u.radius())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactorOptions {
    /// Padding on each side of the window; `None` picks [`default_pad`].
    pub pad: Option<usize>,
    /// Largest blockwise change between the `P` and `2P` runs for a column
    /// to be accepted.
    pub tol: f64,
    pub eps_tail: f64,
    /// `None` picks [`default_max_offset`].
    pub max_offset: Option<usize>,
    /// Smallest accepted positivity certificate.
    pub delta: f64,
}

impl Default for FactorOptions {
    fn default() -> Self {
        Self {
            pad: None,
            tol: DEFAULT_STABILIZATION_TOL,
            eps_tail: DEFAULT_EPS_TAIL,
            max_offset: None,
            delta: DEFAULT_PD_FLOOR,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FactorizationReport {
    /// Upper factor on the accepted window, ghost rows included.
    pub factor: NSOperator,
    pub inverse_factor: NSOperator,
    /// Wiener norm of `P(W - W+* W+)P` on the accepted window.
    pub reconstruction_residual: f64,
    /// Wiener norm of `P(W+ W+^{-1} - I)P` on the accepted window.
    pub inverse_residual: f64,
    pub stabilization_gap: f64,
    pub accepted_window: IndexWindow,
    pub min_eig_certificate: f64,
    pub tail_mass: f64,
    /// Fitted geometric decay rate of the inverse diagonals.
    pub decay_rate: Option<f64>,
    pub pad: usize,
    pub tol: f64,
    pub eps_tail: f64,
    pub max_offset: usize,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TriangularInverse {
    pub inverse: NSOperator,
    /// Wiener norm of the first diagonal left out.
    pub tail_mass: f64,
    /// `rho` of a least-squares fit `|V_[m]| ~ C rho^m`; `None` with fewer
    /// than two nonzero diagonals past the main one.
    pub decay_rate: Option<f64>,
    pub warnings: Vec<String>,
}

fn check_self_adjoint(w: &NSOperator) -> Result<()> {
    let scale = w
        .diagonals()
        .flat_map(|(_, d)| d.blocks().iter().map(Block::max_abs))
        .fold(1.0, f64::max);
    let dev = w.self_adjoint_deviation();
    if dev > HERMITIAN_TOL * scale {
        return Err(WienerError::NotSelfAdjoint { deviation: dev });
    }
    Ok(())
}

/// The self-adjoint operator on `window` whose upper diagonals are those of
/// `W` continued by edge repetition, with the lower part mirrored from them.
pub fn hermitian_extension(w: &NSOperator, window: IndexWindow) -> Result<NSOperator> {
    let m = w.block_size();
    let upper = w.extend_clamped(window)?;
    let diag = NSOperator::from_parts(
        m,
        window,
        Some(window),
        upper
            .diagonals()
            .filter(|(n, _)| *n == 0)
            .map(|(n, d)| (n, d.clone())),
    );
    let strict = NSOperator::from_parts(
        m,
        window,
        Some(window),
        upper
            .diagonals()
            .filter(|(n, _)| *n > 0)
            .map(|(n, d)| (n, d.clone())),
    );
    let full = add(&add(&diag, &strict)?, &adjoint(&strict))?;
    Ok(full.compress(window).with_exact_interior(Some(window)))
}

fn section(w: &NSOperator, window: IndexWindow) -> Result<DenseTruncation> {
    render(&hermitian_extension(w, window)?, window)
}

/// Lower bound on the spectrum of the section of `W` on `window` (continued
/// past `W`'s own window as described in the module docs). Fails unless the
/// bound reaches `delta`.
pub fn check_positive(w: &NSOperator, window: IndexWindow, delta: f64) -> Result<f64> {
    check_self_adjoint(w)?;
    let cert = min_eig_lower_bound(&section(w, window)?, CERTIFICATE_TOL)?;
    if cert < delta {
        return Err(WienerError::NotUniformlyPositive {
            certificate: cert,
            delta,
        });
    }
    Ok(cert)
}

/// Positivity certificate without the threshold test.
pub fn positivity_certificate(w: &NSOperator, window: IndexWindow) -> Result<f64> {
    check_self_adjoint(w)?;
    min_eig_lower_bound(&section(w, window)?, CERTIFICATE_TOL)
}

pub fn spectral_factor(w: &NSOperator, pad: usize, tol: f64) -> Result<FactorizationReport> {
    spectral_factor_with(
        w,
        &FactorOptions {
            pad: Some(pad),
            tol,
            ..FactorOptions::default()
        },
    )
}

pub fn spectral_factor_with(w: &NSOperator, opts: &FactorOptions) -> Result<FactorizationReport> {
    check_self_adjoint(w)?;
    if !(opts.tol > 0.0) {
        return Err(WienerError::OutOfRange {
            name: "tol",
            value: opts.tol,
        });
    }
    let b = w.radius();
    let pad = opts.pad.unwrap_or_else(|| default_pad(w));
    if (pad as i64) < b {
        return Err(WienerError::OutOfRange {
            name: "pad",
            value: pad as f64,
        });
    }
    let window = w.window();
    let wide = window
        .expand(2 * pad as i64)
        .expect("expansion is non-empty");
    let wide_section = section(w, wide)?;
    let certificate = min_eig_lower_bound(&wide_section, CERTIFICATE_TOL)?;
    if certificate < opts.delta {
        return Err(WienerError::NotUniformlyPositive {
            certificate,
            delta: opts.delta,
        });
    }

    let (factor, gap, accepted) = if b == 0 {
        (diagonal_factor(w)?, 0.0, window)
    } else {
        let narrow = window.expand(pad as i64).expect("expansion is non-empty");
        let r_narrow = band_factor(&section(w, narrow)?, b)?;
        let r_wide = band_factor(&wide_section, b)?;
        let (accepted, gap) = stable_run(&r_narrow, &r_wide, window, b, opts.tol)?;
        (r_wide.rewindow(accepted), gap, accepted)
    };
    let factor = factor.with_exact_interior(Some(accepted));

    let max_offset = opts
        .max_offset
        .unwrap_or_else(|| default_max_offset(&factor));
    let inv = triangular_inverse(&factor, opts.eps_tail, max_offset)?;
    let inverse_factor = inv.inverse.with_exact_interior(Some(accepted));

    let reconstruction_residual = reconstruction_residual(w, &factor, accepted)?;
    let inverse_residual = inverse_residual(&factor, &inverse_factor, accepted)?;

    let mut warnings = inv.warnings;
    if accepted != window {
        warnings.push(format!(
            "accepted window {accepted} is smaller than the input window {window}"
        ));
    }
    Ok(FactorizationReport {
        factor,
        inverse_factor,
        reconstruction_residual,
        inverse_residual,
        stabilization_gap: gap,
        accepted_window: accepted,
        min_eig_certificate: certificate,
        tail_mass: inv.tail_mass,
        decay_rate: inv.decay_rate,
        pad,
        tol: opts.tol,
        eps_tail: opts.eps_tail,
        max_offset,
        warnings,
    })
}

/// Blockwise Cholesky of a block-diagonal `W`.
fn diagonal_factor(w: &NSOperator) -> Result<NSOperator> {
    let m = w.block_size();
    let window = w.window();
    let zero = Diagonal::zeros(m, window);
    let d0 = w.diagonal(0).unwrap_or(&zero);
    let mut blocks = Vec::with_capacity(window.len());
    for (i, b) in d0.iter() {
        let r = b.cholesky_upper().ok_or(WienerError::NotPositiveDefinite {
            pivot: (i - window.lo()) as usize * m,
            value: b.min_singular_value(),
        })?;
        blocks.push(r);
    }
    NSOperator::from_diagonals(m, window, [(0, blocks)])
}

/// Cholesky factor of a section, read back as diagonals `0..=b`.
fn band_factor(t: &DenseTruncation, b: i64) -> Result<NSOperator> {
    let r = cholesky_upper_with(t, DEFAULT_PD_FLOOR)?;
    let full = extract_diagonals(&r);
    Ok(NSOperator::from_parts(
        full.block_size(),
        full.window(),
        Some(full.window()),
        full.diagonals()
            .filter(|(n, _)| (0..=b).contains(n))
            .map(|(n, d)| (n, d.clone())),
    ))
}

/// Longest run of columns of `window` on which the two factors differ by less
/// than `tol` in every stored block; returns it with its largest gap.
fn stable_run(
    a: &NSOperator,
    b: &NSOperator,
    window: IndexWindow,
    radius: i64,
    tol: f64,
) -> Result<(IndexWindow, f64)> {
    let gaps: Vec<f64> = window
        .iter()
        .map(|i| {
            (0..=radius)
                .map(|n| a.entry(i - n, i).max_abs_diff(&b.entry(i - n, i)))
                .fold(0.0, f64::max)
        })
        .collect();
    let mut best: Option<(usize, usize)> = None;
    let mut start = None;
    for (k, &g) in gaps
        .iter()
        .enumerate()
        .chain([(gaps.len(), &f64::INFINITY)])
    {
        if g < tol {
            start.get_or_insert(k);
        } else if let Some(s) = start.take() {
            if best.is_none_or(|(bs, be)| k - s > be - bs) {
                best = Some((s, k));
            }
        }
    }
    match best {
        Some((s, e)) => {
            let run = IndexWindow::new(window.lo() + s as i64, window.lo() + e as i64 - 1)?;
            let gap = gaps[s..e].iter().copied().fold(0.0, f64::max);
            Ok((run, gap))
        }
        None => Err(WienerError::StabilizationFailure {
            gap: gaps.iter().copied().fold(f64::INFINITY, f64::min),
            tol,
        }),
    }
}

/// `|P (W - F* F) P|_W` over `cols`.
pub fn reconstruction_residual(w: &NSOperator, f: &NSOperator, cols: IndexWindow) -> Result<f64> {
    let product = multiply(&adjoint(f), f)?;
    Ok(wiener_norm(&sub(
        &w.compress(cols),
        &product.compress(cols),
    )?))
}

/// `|P (F V - I) P|_W` over `cols`.
pub fn inverse_residual(f: &NSOperator, v: &NSOperator, cols: IndexWindow) -> Result<f64> {
    let id = NSOperator::identity(f.block_size(), cols)?;
    let product = multiply(f, v)?;
    Ok(wiener_norm(&sub(&product.compress(cols), &id)?))
}

/// Inverse of the compression of an upper operator to its column window,
/// one diagonal at a time:
/// `V_[0] = U_[0]^{-1}`,
/// `V_[m] = -(U_[0]^(m))^{-1} sum_{n=1..m} U_[n]^(m-n) V_[m-n]`.
/// Stops at the first diagonal with Wiener norm below `eps_tail`, or after
/// `max_offset`.
pub fn triangular_inverse(
    u: &NSOperator,
    eps_tail: f64,
    max_offset: usize,
) -> Result<TriangularInverse> {
    u.require_upper()?;
    let m = u.block_size();
    let window = u.window();
    let zero = Diagonal::zeros(m, window);
    let u0 = u.diagonal(0).unwrap_or(&zero);
    let mut u0_inv = Vec::with_capacity(window.len());
    for (i, b) in u0.iter() {
        u0_inv.push(b.inverse().ok_or(WienerError::SingularBlock { index: i })?);
    }
    let u0_inv = Diagonal::new(window, u0_inv)?;
    let mut v: Vec<Diagonal> = vec![u0_inv.clone()];
    let mut norms = Vec::new();
    let mut mm = 1usize;
    let tail_mass = loop {
        let next = next_inverse_diagonal(u, &u0_inv, &v, mm);
        let norm = next.norm();
        if norm < eps_tail || mm > max_offset {
            break norm;
        }
        norms.push(norm);
        v.push(next);
        mm += 1;
    };
    let inverse = NSOperator::from_parts(
        m,
        window,
        u.exact_interior(),
        v.into_iter().enumerate().map(|(n, d)| (n as i64, d)),
    );
    let decay_rate = fit_decay(&norms);
    let mut warnings = Vec::new();
    if let Some(rho) = decay_rate {
        if rho >= 1.0 {
            warnings.push(format!(
                "inverse diagonals do not decay geometrically (fitted rate {rho:.4})"
            ));
        }
    }
    if tail_mass >= eps_tail {
        warnings.push(format!(
            "inverse truncated at offset {max_offset} with tail mass {tail_mass:.3e}"
        ));
    }
    Ok(TriangularInverse {
        inverse,
        tail_mass,
        decay_rate,
        warnings,
    })
}

fn next_inverse_diagonal(u: &NSOperator, u0_inv: &Diagonal, v: &[Diagonal], mm: usize) -> Diagonal {
    let m = u.block_size();
    let window = u.window();
    let shift = mm as i64;
    Diagonal::from_fn(window, |c| {
        // Row c - mm of the compression must exist.
        let Some(pivot_inv) = u0_inv.get(c - shift) else {
            return Block::zeros(m);
        };
        let mut acc = Block::zeros(m);
        for n in 1..=mm {
            let Some(un) = u.diagonal(n as i64) else {
                continue;
            };
            // U_[n]^(mm-n) at column c is U_[n] at column c - (mm - n).
            let (Some(ub), Some(vb)) = (un.get(c - (mm - n) as i64), v[mm - n].get(c)) else {
                continue;
            };
            acc.add_product(ub, vb);
        }
        let mut out = pivot_inv.matmul(&acc);
        out = out.scale_real(-1.0);
        out
    })
}

/// Least-squares slope of `ln |V_[m]|` against `m`, returned as a rate.
fn fit_decay(norms: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = norms
        .iter()
        .enumerate()
        .filter(|(_, &n)| n > 0.0)
        .map(|(k, &n)| ((k + 1) as f64, n.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let len = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / len;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / len;
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    Some((sxy / sxx).exp())
}

/// Rewrites an upper factor so that every main-diagonal block is upper
/// triangular with positive diagonal: row block `r` is multiplied by
/// `Q_r^*`, where `U_[0](r) = Q_r R_r` is a QR split. Rows outside the window
/// reuse the nearest stored block.
pub fn normalize_positive_diagonal(u: &NSOperator) -> Result<NSOperator> {
    u.require_upper()?;
    let m = u.block_size();
    let window = u.window();
    let zero = Diagonal::zeros(m, window);
    let u0 = u.diagonal(0).unwrap_or(&zero);
    let mut q_adj = Vec::with_capacity(window.len());
    for (i, b) in u0.iter() {
        let r = b
            .adjoint()
            .matmul(b)
            .cholesky_upper()
            .ok_or(WienerError::SingularBlock { index: i })?;
        let r_inv = r.inverse().ok_or(WienerError::SingularBlock { index: i })?;
        q_adj.push(b.matmul(&r_inv).adjoint());
    }
    let q_adj = Diagonal::new(window, q_adj)?;
    let (lo, hi) = (window.lo(), window.hi());
    Ok(NSOperator::from_parts(
        m,
        window,
        u.exact_interior(),
        u.diagonals().map(|(n, d)| {
            (
                n,
                Diagonal::from_fn(window, |c| {
                    let q = q_adj.get((c - n).clamp(lo, hi)).unwrap();
                    q.matmul(d.get(c).unwrap())
                }),
            )
        }),
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CayleyReport {
    /// Power-iteration estimate of `|S|` for `S = (I + Phi)^{-1} (I - Phi)`.
    pub s_norm_estimate: f64,
    /// `Re Phi(z) > 0` at every sample point.
    pub re_positive: bool,
    /// Certified lower bounds of `Re Phi(z)` at [`cayley_sample_points`].
    pub re_lower_bounds: Vec<f64>,
}

/// Builds `Phi` with `Re Phi = W` on the padded section and checks that its
/// Cayley transform is a contraction.
pub fn cayley_check(w: &NSOperator, pad: usize) -> Result<CayleyReport> {
    cayley_check_with_seed(w, pad, DEFAULT_SEED)
}

pub fn cayley_check_with_seed(w: &NSOperator, pad: usize, seed: u64) -> Result<CayleyReport> {
    check_self_adjoint(w)?;
    let window = w
        .window()
        .expand(pad as i64)
        .expect("expansion is non-empty");
    let wh = hermitian_extension(w, window)?;
    let phi = phi_of(&wh)?;
    let dense_phi = render(&phi, window)?;
    let n = dense_phi.dim();
    let id = CMatrix::identity(n);
    let plus = dense_phi.map_data(|p| id.zip_with(p, |a, b| a + b));
    let minus = id.zip_with(dense_phi.data(), |a, b| a - b);
    let s = triangular_solve_upper(&plus, &minus)?;
    let s_norm_estimate = spectral_norm_estimate(&s, seed);

    let mut re_lower_bounds = Vec::new();
    for z in cayley_sample_points() {
        let pz = zadeh_eval(&phi, z)?.result;
        let dense = render(&pz, window)?.hermitian_part();
        re_lower_bounds.push(min_eig_lower_bound_matrix(dense.data(), CERTIFICATE_TOL)?);
    }
    Ok(CayleyReport {
        s_norm_estimate,
        re_positive: re_lower_bounds.iter().all(|&x| x > 0.0),
        re_lower_bounds,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub tol: f64,
    /// Padding of the reference run for the uniqueness check; `None` picks
    /// twice [`default_pad`].
    pub pad: Option<usize>,
    pub eps_tail: f64,
    pub max_offset: Option<usize>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_VERIFY_TOL,
            pad: None,
            eps_tail: DEFAULT_EPS_TAIL,
            max_offset: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verification {
    /// Columns on which the factor is checked.
    pub window: IndexWindow,
    pub reconstruction: f64,
    /// `(t, largest entry of P(W(e^{it}) - F(e^{it})* F(e^{it}))P)`.
    pub boundary: Vec<(f64, f64)>,
    pub inverse: f64,
    /// Gap to an independent run after normalization; `None` if that run
    /// failed.
    pub uniqueness: Option<f64>,
    pub log: Vec<String>,
    pub passed: bool,
}

/// End-to-end check of a candidate factor `F` of `W`: reconstruction, the
/// boundary identity `W(e^{it}) = F(e^{it})* F(e^{it})` at each `t`, the
/// inverse residual, and agreement with an independent run.
pub fn verify_factorization(
    w: &NSOperator,
    factor: &NSOperator,
    t_samples: &[f64],
    opts: &VerifyOptions,
) -> Result<Verification> {
    w.check_block_size(factor)?;
    factor.require_upper()?;
    let cols = factor
        .exact_interior()
        .unwrap_or(factor.window())
        .intersect(&w.window())
        .ok_or(WienerError::WindowTooSmall {
            window: w.window(),
            required: factor.window(),
        })?;
    let mut log = Vec::new();
    let tol = opts.tol;

    let reconstruction = reconstruction_residual(w, factor, cols)?;
    log.push(format!("reconstruction residual {reconstruction:.3e}"));

    let mut boundary = Vec::with_capacity(t_samples.len());
    for &t in t_samples {
        let z = Complex64::from_polar(1.0, t);
        let wt = zadeh_eval(w, z)?.result.compress(cols);
        let ft = zadeh_eval(factor, z)?.result;
        let pt = multiply(&adjoint(&ft), &ft)?.compress(cols);
        let diff = render(&wt, cols)?
            .data()
            .max_abs_diff(render(&pt, cols)?.data());
        log.push(format!("boundary residual at t = {t} is {diff:.3e}"));
        boundary.push((t, diff));
    }

    let max_offset = opts
        .max_offset
        .unwrap_or_else(|| default_max_offset(factor));
    let inv = triangular_inverse(factor, opts.eps_tail, max_offset)?;
    let inverse = inverse_residual(factor, &inv.inverse, cols)?;
    log.push(format!("inverse residual {inverse:.3e}"));
    log.extend(inv.warnings);

    let ref_opts = FactorOptions {
        pad: Some(opts.pad.unwrap_or_else(|| 2 * default_pad(w))),
        eps_tail: opts.eps_tail,
        ..FactorOptions::default()
    };
    let uniqueness = match spectral_factor_with(w, &ref_opts) {
        Ok(reference) => {
            let common = reference.accepted_window.intersect(&cols);
            match (common, normalize_positive_diagonal(factor)) {
                (Some(common), Ok(normalized)) => {
                    let gap = normalized.max_abs_diff_on(&reference.factor, common);
                    log.push(format!("gap to independent run on {common} is {gap:.3e}"));
                    Some(gap)
                }
                (None, _) => {
                    log.push("independent run shares no accepted columns".into());
                    None
                }
                (_, Err(e)) => {
                    log.push(format!("normalization failed: {e}"));
                    None
                }
            }
        }
        Err(e) => {
            log.push(format!("independent run failed: {e}"));
            None
        }
    };

    let passed = reconstruction <= tol
        && boundary.iter().all(|&(_, r)| r <= tol)
        && inverse <= tol
        && uniqueness.is_some_and(|g| g <= tol);
    Ok(Verification {
        window: cols,
        reconstruction,
        boundary,
        inverse,
        uniqueness,
        log,
        passed,
    })
}
