//! Root finding for the period problem and the special constants.

use serde::Serialize;

use crate::error::{Error, Result, Warning};
use crate::periods::{
    dq_db_diagonal, edge_periods, intersection_residual, period_residuals, rho_from_periods,
    EdgePeriods, FamilyParams,
};
use crate::specfun::{e_pair, k_pair};

/// Outcome of a bracketed root solve.
#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    /// Solved parameters with `ρ` filled in.
    pub params: FamilyParams,
    /// `|Q|` at the solution.
    pub residual_q: f64,
    /// Worst relative residual of the two period conditions after applying `ρ`.
    pub residual_period: f64,
    /// Final bracket of the solve variable (`t` for oΔ, `a` for tΔ).
    pub bracket: (f64, f64),
    pub iterations: usize,
    /// `(x, f(x))` for every iterate.
    pub trace: Vec<(f64, f64)>,
    pub warnings: Vec<Warning>,
}

/// Brent's method on a sign-changing bracket. Stops when `|f| ≤ ftol` or the
/// bracket is narrower than `xtol`.
pub(crate) struct Brent {
    pub root: f64,
    pub value: f64,
    pub bracket: (f64, f64),
    pub iterations: usize,
    pub trace: Vec<(f64, f64)>,
}

pub(crate) fn brent<F>(
    mut f: F,
    lo: f64,
    hi: f64,
    f_lo: f64,
    f_hi: f64,
    xtol: f64,
    ftol: f64,
) -> Result<Brent>
where
    F: FnMut(f64) -> Result<f64>,
{
    const MAX_ITER: usize = 200;
    let (mut a, mut b, mut fa, mut fb) = (lo, hi, f_lo, f_hi);
    if fa * fb > 0.0 {
        return Err(Error::Bracket {
            t_lo: lo,
            t_hi: hi,
            samples: vec![(lo, fa), (hi, fb)],
        });
    }
    let mut trace = Vec::new();
    if fa == 0.0 {
        return Ok(Brent {
            root: a,
            value: 0.0,
            bracket: (a, a),
            iterations: 0,
            trace,
        });
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for iter in 1..=MAX_ITER {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let xm = 0.5 * (c - b);
        if fb.abs() <= ftol || xm.abs() <= tol1 || fb == 0.0 {
            let bracket = if b < c { (b, c) } else { (c, b) };
            return Ok(Brent {
                root: b,
                value: fb,
                bracket,
                iterations: iter - 1,
                trace,
            });
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            if 2.0 * p < (3.0 * xm * q - (tol1 * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b)?;
        trace.push((b, fb));
    }
    Err(Error::IterationLimit("Brent root finder"))
}

/// Initial relative offset of the bracket expansion above `b`.
const BRACKET_DELTA: f64 = 1e-3;
/// Smallest relative offset tried when `Q(b(1+δ))` is already negative.
const BRACKET_DELTA_MIN: f64 = 1e-9;
/// The expansion gives up at `t = BRACKET_LIMIT · b`.
const BRACKET_LIMIT: f64 = 1e8;

fn q_at(a: f64, b: f64, t: f64) -> Result<(f64, EdgePeriods)> {
    let e = edge_periods(&FamilyParams::new(a, b, t)?)?;
    Ok((e.q(), e))
}

/// Finds `t > b` with `Q(a, b; t) = 0` for `1 < a < b`.
pub fn solve_odelta(a: f64, b: f64, tol: f64) -> Result<SolveReport> {
    if !(tol > 0.0) {
        return Err(Error::Input(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    if !(a.is_finite() && b.is_finite() && 1.0 < a && a < b) {
        return Err(Error::domain(format!(
            "solve_odelta needs 1 < a < b (a = b is the classical locus), got a = {a}, b = {b}"
        )));
    }
    let q = |t: f64| q_at(a, b, t).map(|(q, _)| q);
    let mut samples = Vec::new();

    // Lower end: Q > 0 as t → b+; shrink the offset if needed.
    let mut delta = BRACKET_DELTA;
    let mut lo = b * (1.0 + delta);
    let mut q_lo = q(lo)?;
    samples.push((lo, q_lo));
    while q_lo <= 0.0 && delta > BRACKET_DELTA_MIN {
        delta /= 8.0;
        lo = b * (1.0 + delta);
        q_lo = q(lo)?;
        samples.push((lo, q_lo));
    }
    if q_lo <= 0.0 {
        return Err(Error::Bracket {
            t_lo: lo,
            t_hi: lo,
            samples,
        });
    }
    // Upper end: geometric expansion t = b + 2^k δ b.
    let mut step = BRACKET_DELTA * b;
    let (hi, q_hi) = loop {
        step *= 2.0;
        let t = b + step;
        if t > BRACKET_LIMIT * b {
            return Err(Error::Bracket {
                t_lo: b * (1.0 + delta),
                t_hi: BRACKET_LIMIT * b,
                samples,
            });
        }
        let qt = q(t)?;
        samples.push((t, qt));
        if qt < 0.0 {
            break (t, qt);
        }
        lo = t;
        q_lo = qt;
    };

    let solve = brent(q, lo, hi, q_lo, q_hi, 0.0, 0.5 * tol)?;
    let t = solve.root;
    let params = FamilyParams::new(a, b, t)?;
    let (residual_q, e) = q_at(a, b, t)?;
    let rho = rho_from_periods(&e)?;
    let (r1, r2) = period_residuals(&e, rho);
    Ok(SolveReport {
        params: params.with_rho(rho)?,
        residual_q: residual_q.abs(),
        residual_period: r1.max(r2),
        bracket: solve.bracket,
        iterations: solve.iterations,
        trace: solve.trace,
        warnings: params.warnings(),
    })
}

/// `2E(m) − K(m)` at `m = a²/(1+a²)`, written with the complement
/// `1 − m = 1/(1+a²)` so it stays accurate for large `a`.
pub fn tetragonal_intersection_residual(a: f64) -> Result<f64> {
    let m = a * a / (1.0 + a * a);
    let mc = 1.0 / (1.0 + a * a);
    Ok(2.0 * e_pair(m, mc)? - k_pair(m, mc)?)
}

/// The parameter `a*` where the tetragonal families meet: the root of
/// `2E(m) = K(m)` expressed through `m = a²/(1+a²)`.
pub fn solve_tstar() -> Result<f64> {
    let f = tetragonal_intersection_residual;
    let (lo, hi) = (1.0, 4.0);
    let s = brent(f, lo, hi, f(lo)?, f(hi)?, 1e-15, 0.0)?;
    Ok(s.root)
}

/// Point on the curve where the two orthorhombic families intersect.
#[derive(Debug, Clone, Serialize)]
pub struct BoundaryPoint {
    pub a: f64,
    pub t: f64,
    /// `K̄(m₁)E(m₂) + Ē(m₁)K(m₂) − K̄(m₁)K(m₂)` at the root.
    pub residual: f64,
    /// `∂Q/∂b (a, a; t)` at the root.
    pub dq_db: f64,
    pub iterations: usize,
}

/// Solves the intersection equation
/// `K̄(m₁)E(m₂) + Ē(m₁)K(m₂) = K̄(m₁)K(m₂)` for `t > a`.
pub fn boundary_curve(a: f64) -> Result<BoundaryPoint> {
    if !(a.is_finite() && a > 1.0) {
        return Err(Error::domain(format!(
            "boundary curve needs a > 1, got {a}"
        )));
    }
    let f = |t: f64| intersection_residual(a, t);
    let mut scan = Vec::new();
    let mut lo = a * (1.0 + 1e-8);
    let mut f_lo = f(lo)?;
    scan.push((lo, f_lo));
    // The residual tends to π/2 at t = a+; march outward by factors of 2 in t − a.
    let mut gap = 1e-8 * a;
    let (hi, f_hi) = loop {
        gap *= 2.0;
        let t = a + gap;
        if t > 1e8 * a {
            return Err(Error::NotFound {
                reason: format!(
                    "no sign change of the intersection residual for t in ({:e}, {:e})",
                    a * (1.0 + 1e-8),
                    1e8 * a
                ),
                scan,
            });
        }
        let ft = f(t)?;
        scan.push((t, ft));
        if ft.signum() != f_lo.signum() {
            break (t, ft);
        }
        lo = t;
        f_lo = ft;
    };
    let s = brent(f, lo, hi, f_lo, f_hi, 0.0, 1e-14)?;
    Ok(BoundaryPoint {
        a,
        t: s.root,
        residual: s.value,
        dq_db: dq_db_diagonal(a, s.root)?,
        iterations: s.iterations,
    })
}

/// Grid size of the sign scan in [`solve_tdelta`].
const TDELTA_SCAN: usize = 48;

/// `[(I₁+I₅) − (I₂+I₄)] / ((I₂+I₄)(b − a))` at `t = ab`. The division by
/// `b − a` removes the trivial root `a = b`.
pub fn tdelta_residual(a: f64, b: f64) -> Result<f64> {
    let e = edge_periods(&FamilyParams::new(a, b, a * b)?)?;
    Ok((e.i15() - e.i24()) / (e.i24() * (b - a)))
}

/// Finds `a ∈ (1, b)` such that the tetragonal surface `(a, b, ab)` solves
/// the period problem, i.e. `I₁+I₅ = I₂+I₄`.
pub fn solve_tdelta(b: f64, tol: f64) -> Result<SolveReport> {
    if !(tol > 0.0) {
        return Err(Error::Input(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    if !(b.is_finite() && b > 1.0) {
        return Err(Error::domain(format!("solve_tdelta needs b > 1, got {b}")));
    }
    // At the bifurcation point the non-trivial root merges with a = b.
    let m = b * b / (1.0 + b * b);
    let mc = 1.0 / (1.0 + b * b);
    if tetragonal_intersection_residual(b)?.abs() < tol * k_pair(m, mc)? {
        return tdelta_report(b, b, (b, b), 0, Vec::new(), vec![Warning::Bifurcation]);
    }
    let f = |a: f64| tdelta_residual(a, b);
    let grid: Vec<f64> = (1..TDELTA_SCAN)
        .map(|k| 1.0 + (b - 1.0) * k as f64 / TDELTA_SCAN as f64)
        .collect();
    let mut scan = Vec::with_capacity(grid.len());
    for &a in &grid {
        scan.push((a, f(a)?));
    }
    let Some(w) = scan.windows(2).find(|w| w[0].1.signum() != w[1].1.signum()) else {
        return Err(Error::NotFound {
            reason: format!("no tetragonal solution with a in (1, {b})"),
            scan,
        });
    };
    let (lo, hi) = (w[0], w[1]);
    let s = brent(f, lo.0, hi.0, lo.1, hi.1, 0.0, 0.5 * tol)?;
    tdelta_report(s.root, b, s.bracket, s.iterations, s.trace, Vec::new())
}

fn tdelta_report(
    a: f64,
    b: f64,
    bracket: (f64, f64),
    iterations: usize,
    trace: Vec<(f64, f64)>,
    mut warnings: Vec<Warning>,
) -> Result<SolveReport> {
    let params = FamilyParams::new(a, b, a * b)?;
    let e = edge_periods(&params)?;
    let rho = rho_from_periods(&e)?;
    // The involution z ↦ −t/z maps edge k to edge k+3 and exchanges the two
    // forms, so ρI_k = J_{k+3}/ρ for k = 1, 2 once the periods close.
    let sym = [(0, 3), (1, 4), (3, 0), (4, 1)]
        .iter()
        .map(|&(k, l)| (rho * e.i[k] - e.j[l] / rho).abs() / (e.j[l] / rho))
        .fold(0.0, f64::max);
    if sym > 1e-9 {
        return Err(Error::Inconsistent {
            residual: sym,
            tolerance: 1e-9,
        });
    }
    let (r1, r2) = period_residuals(&e, rho);
    warnings.extend(params.warnings());
    Ok(SolveReport {
        params: params.with_rho(rho)?,
        residual_q: e.q().abs(),
        residual_period: r1.max(r2),
        bracket,
        iterations,
        trace,
        warnings,
    })
}

/// Sign changes of `Q(a, b; ·)` on a log grid of `t ∈ (b, 10⁴ b)`.
#[derive(Debug, Clone, Serialize)]
pub struct RootCount {
    pub count: usize,
    pub roots: Vec<f64>,
    pub samples: Vec<(f64, f64)>,
}

pub fn count_roots(a: f64, b: f64, grid: usize) -> Result<RootCount> {
    if !(a.is_finite() && b.is_finite() && 1.0 < a && a < b) {
        return Err(Error::domain(format!(
            "count_roots needs 1 < a < b, got a = {a}, b = {b}"
        )));
    }
    if grid < 2 {
        return Err(Error::Input("grid needs at least 2 points".into()));
    }
    // log-spaced offsets t − b from 10⁻⁴ b to (10⁴ − 1) b
    let (lo, hi) = ((1e-4f64).ln(), (1e4f64 - 1.0).ln());
    let mut samples = Vec::with_capacity(grid);
    for k in 0..grid {
        let t = b + b * (lo + (hi - lo) * k as f64 / (grid - 1) as f64).exp();
        samples.push((t, q_at(a, b, t)?.0));
    }
    let mut roots = Vec::new();
    for w in samples.windows(2) {
        let ((t0, q0), (t1, q1)) = (w[0], w[1]);
        if q0.signum() != q1.signum() {
            let s = brent(|t| q_at(a, b, t).map(|r| r.0), t0, t1, q0, q1, 0.0, 1e-12)?;
            roots.push(s.root);
        }
    }
    Ok(RootCount {
        count: roots.len(),
        roots,
        samples,
    })
}
