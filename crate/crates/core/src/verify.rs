//! Self-check suites: each check compares a computed quantity against an
//! independent value and reports the worst deviation over its samples.

use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, PI};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::gauss::antipodality_test;
use crate::periods::{
    closed_form_periods_diagonal, diagonal_derivatives, edge_periods, limit_f, solve_rho,
    EdgePeriods, FamilyParams,
};
use crate::solver::solve_odelta;
use crate::specfun::{ellip_e, ellip_e_bar, ellip_k, ellip_k_bar};
use crate::surface::{
    boundary_residuals, conjugate_cell_ratio, extend_to_lattice_cell, fundamental_hexagon,
    ANCHOR_TOL, CUBIC_POINT,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Specfun,
    Periods,
    Derivatives,
    Gauss,
    Surface,
    All,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "specfun" => Suite::Specfun,
            "periods" => Suite::Periods,
            "derivatives" => Suite::Derivatives,
            "gauss" => Suite::Gauss,
            "surface" => Suite::Surface,
            "all" => Suite::All,
            other => return Err(Error::Input(format!("unknown suite {other:?}"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    /// Worst deviation over the samples.
    pub worst: f64,
    pub tolerance: f64,
    pub samples: usize,
    pub passed: bool,
    /// Set when the check could not be evaluated.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Check {
    fn new(name: &str, worst: f64, tolerance: f64, samples: usize) -> Self {
        Check {
            name: name.into(),
            worst,
            tolerance,
            samples,
            passed: worst <= tolerance,
            error: None,
        }
    }

    /// A boolean check; `worst` is 0 on success and 1 on failure.
    fn flag(name: &str, ok: bool, samples: usize) -> Self {
        Check::new(name, if ok { 0.0 } else { 1.0 }, 0.0, samples)
    }

    fn from_result(name: &str, tolerance: f64, r: Result<(f64, usize)>) -> Self {
        match r {
            Ok((worst, n)) => Check::new(name, worst, tolerance, n),
            Err(e) => Check {
                name: name.into(),
                worst: f64::NAN,
                tolerance,
                samples: 0,
                passed: false,
                error: Some(e.to_string()),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
    pub passed: bool,
}

fn report(suite: Suite, checks: Vec<Check>) -> SuiteReport {
    let passed = checks.iter().all(|c| c.passed);
    SuiteReport {
        suite,
        checks,
        passed,
    }
}

/// Runs one suite (or all of them).
pub fn run(suite: Suite) -> Vec<SuiteReport> {
    match suite {
        Suite::Specfun => vec![specfun()],
        Suite::Periods => vec![periods()],
        Suite::Derivatives => vec![derivatives()],
        Suite::Gauss => vec![gauss()],
        Suite::Surface => vec![surface()],
        Suite::All => vec![specfun(), periods(), derivatives(), gauss(), surface()],
    }
}

fn rel(x: f64, reference: f64) -> f64 {
    ((x - reference) / reference).abs()
}

fn specfun() -> SuiteReport {
    let legendre = (|| {
        let mut worst: f64 = 0.0;
        for i in 1..100 {
            let m = i as f64 / 100.0;
            let (k, e, kb, eb) = (ellip_k(m)?, ellip_e(m)?, ellip_k_bar(m)?, ellip_e_bar(m)?);
            worst = worst.max((kb * e + eb * k - kb * k - FRAC_PI_2).abs());
        }
        Ok((worst, 99))
    })();
    let endpoints = (|| {
        Ok((
            (ellip_k(0.0)? - FRAC_PI_2)
                .abs()
                .max((ellip_e(0.0)? - FRAC_PI_2).abs())
                .max((ellip_e(1.0)? - 1.0).abs()),
            3,
        ))
    })();
    report(
        Suite::Specfun,
        vec![
            Check::from_result("legendre_relation", 1e-12, legendre),
            Check::from_result("endpoint_values", 1e-15, endpoints),
        ],
    )
}

/// `(a, t)` grid on the diagonal: `a ∈ [1.2, 4]`, `t ∈ (a, 10a]`.
fn diagonal_grid(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        let a = 1.2 + 2.8 * i as f64 / (n - 1) as f64;
        for j in 0..n {
            let t = a * (1.05 + 8.95 * j as f64 / (n - 1) as f64);
            out.push((a, t));
        }
    }
    out
}

fn worst_period_error(q: &EdgePeriods, c: &EdgePeriods) -> f64 {
    [0, 1, 3, 4]
        .iter()
        .flat_map(|&k| [rel(q.i[k], c.i[k]), rel(q.j[k], c.j[k])])
        .fold(0.0, f64::max)
}

fn periods() -> SuiteReport {
    let closed_forms = (|| {
        let grid = diagonal_grid(10);
        let mut worst: f64 = 0.0;
        for &(a, t) in &grid {
            let q = edge_periods(&FamilyParams::new(a, a, t)?)?;
            worst = worst.max(worst_period_error(&q, &closed_form_periods_diagonal(a, t)?));
        }
        Ok((worst, grid.len()))
    })();
    let f_diag = (|| {
        let mut worst: f64 = 0.0;
        for a in [1.1, 1.5, 2.0, 3.0, 5.0] {
            worst = worst.max((limit_f(a, a)? - PI).abs());
        }
        Ok((worst, 5))
    })();
    report(
        Suite::Periods,
        vec![
            Check::from_result("closed_forms_vs_quadrature", 1e-9, closed_forms),
            Check::from_result("f_diagonal_is_pi", 1e-10, f_diag),
        ],
    )
}

/// Central difference in `b` at `b = a`.
pub const FD_STEP: f64 = 1e-5;

/// Finite-difference `b`-derivatives `(I₁₅′, I₂₄′, J₁₅′, J₂₄′, Q′)` at `a = b`.
pub fn fd_diagonal_derivatives(a: f64, t: f64, eps: f64) -> Result<[f64; 5]> {
    let hi = edge_periods(&FamilyParams::raw(a, a + eps, t)?)?;
    let lo = edge_periods(&FamilyParams::raw(a, a - eps, t)?)?;
    let d = |f: fn(&EdgePeriods) -> f64| (f(&hi) - f(&lo)) / (2.0 * eps);
    Ok([
        d(EdgePeriods::i15),
        d(EdgePeriods::i24),
        d(EdgePeriods::j15),
        d(EdgePeriods::j24),
        d(EdgePeriods::q),
    ])
}

/// Worst relative deviation of the analytic derivative combinations from
/// central differences. `I₁₅′` vanishes identically, so its deviation is
/// measured relative to `I₁₅`.
pub fn derivative_deviation(a: f64, t: f64) -> Result<f64> {
    let an = diagonal_derivatives(a, t)?;
    let fd = fd_diagonal_derivatives(a, t, FD_STEP)?;
    let i15 = edge_periods(&FamilyParams::new(a, a, t)?)?.i15();
    let errs = [
        (fd[0] - an.d_i15).abs() / i15,
        rel(fd[1], an.d_i24),
        rel(fd[2], an.d_j15),
        rel(fd[3], an.d_j24),
        rel(fd[4], an.dq_db),
    ];
    Ok(errs.into_iter().fold(0.0, f64::max))
}

fn derivatives() -> SuiteReport {
    let combos = (|| {
        let pts = [(1.5, 3.0), (2.0, 5.0), (2.5, 4.0), (3.0, 12.0), (1.3, 1.8)];
        let mut worst: f64 = 0.0;
        for &(a, t) in &pts {
            worst = worst.max(derivative_deviation(a, t)?);
        }
        Ok((worst, pts.len()))
    })();
    report(
        Suite::Derivatives,
        vec![Check::from_result(
            "closed_forms_vs_central_differences",
            1e-6,
            combos,
        )],
    )
}

fn gauss() -> SuiteReport {
    let diagonal = (|| {
        let mut worst: f64 = 0.0;
        let mut n = 0;
        for a in [1.2, 1.7, 2.0, 3.0, 4.5] {
            for f in [1.1, 2.0, 5.0] {
                let r = antipodality_test(&FamilyParams::new(a, a, a * f)?.with_rho(1.0)?)?;
                worst = worst.max(r.pair_residual);
                n += 1;
            }
        }
        Ok((worst, n))
    })();
    let off_diagonal = (|| {
        // report the smallest pair residual; must stay away from zero
        let mut closest = f64::INFINITY;
        let mut n = 0;
        for (a, b) in [(1.2, 1.5), (1.7, 3.0), (2.0, 2.2), (3.0, 4.5)] {
            for f in [1.1, 2.0, 5.0] {
                let r = antipodality_test(&FamilyParams::new(a, b, b * f)?)?;
                closest = closest.min(r.pair_residual);
                n += 1;
            }
        }
        Ok((1e-6 / closest, n))
    })();
    report(
        Suite::Gauss,
        vec![
            Check::from_result("diagonal_antipodal", 1e-12, diagonal),
            Check::from_result("off_diagonal_not_antipodal", 1.0, off_diagonal),
        ],
    )
}

fn geometry_checks(label: &str, params: &FamilyParams, checks: &mut Vec<Check>) {
    let res = fundamental_hexagon(params, 8);
    let mesh = match res {
        Ok(m) => m,
        Err(e) => {
            checks.push(Check::from_result(&format!("{label}_mesh"), 0.0, Err(e)));
            return;
        }
    };
    checks.push(Check::from_result(
        &format!("{label}_boundary_residual"),
        1e-6,
        boundary_residuals(&mesh).map(|r| (r.worst(), mesh.vertices.len())),
    ));
    match extend_to_lattice_cell(&mesh) {
        Ok(cell) => {
            checks.push(Check::new(
                &format!("{label}_weld_residual"),
                cell.weld_residual,
                1e-8,
                8,
            ));
            checks.push(Check::flag(
                &format!("{label}_euler_characteristic_minus_4"),
                cell.euler_characteristic == -4 && cell.closed,
                1,
            ));
        }
        Err(e) => checks.push(Check::from_result(
            &format!("{label}_lattice_cell"),
            1e-8,
            Err(e),
        )),
    }
}

fn surface() -> SuiteReport {
    let mut checks = Vec::new();
    match solve_odelta(2.0, 2.001, 1e-12) {
        Ok(r) => geometry_checks("odelta", &r.params, &mut checks),
        Err(e) => checks.push(Check::from_result("odelta_solve", 0.0, Err(e))),
    }
    let td = (|| {
        let p = FamilyParams::new(2.0, 2.0, 4.0)?;
        p.with_rho(solve_rho(&p)?)
    })();
    match td {
        Ok(p) => geometry_checks("td", &p, &mut checks),
        Err(e) => checks.push(Check::from_result("td_params", 0.0, Err(e))),
    }
    let (a, b, t) = CUBIC_POINT;
    checks.push(Check::from_result(
        "cubic_anchor_cell_ratio",
        ANCHOR_TOL,
        FamilyParams::new(a, b, t)
            .and_then(|p| conjugate_cell_ratio(&p))
            .map(|r| ((r.ratio - 1.0).abs(), 1)),
    ));
    report(Suite::Surface, checks)
}
