//! Acceptance criteria: one PASS/FAIL line per criterion (and per
//! sub-check), non-zero exit status if any criterion fails.

use std::f64::consts::{FRAC_PI_2, PI};
use std::time::{Duration, Instant};

use tpms_core::periods::{denominator_limits, j5_log_lower_bound, limit_f, limit_g};
use tpms_core::surface::{boundary_residuals, conjugate_cell_ratio_ungated, CUBIC_POINT};
use tpms_core::verify::derivative_deviation;
use tpms_core::*;

const A_STAR: f64 = 2.1796604316786983;
const EF_TD_STAR: f64 = 1.05677755;

struct Ledger {
    failed: Vec<String>,
}

impl Ledger {
    fn line(&mut self, id: &str, ok: bool, detail: String) {
        println!(
            "{} criterion {id}: {detail}",
            if ok { "PASS" } else { "FAIL" }
        );
        if !ok {
            self.failed.push(id.to_owned());
        }
    }

    fn result<T>(&mut self, id: &str, r: Result<T>, f: impl FnOnce(T) -> (bool, String)) {
        match r {
            Ok(v) => {
                let (ok, detail) = f(v);
                self.line(id, ok, detail);
            }
            Err(e) => self.line(id, false, format!("error: {e}")),
        }
    }
}

/// Deterministic low-discrepancy points in the unit square.
fn sample(k: usize) -> (f64, f64) {
    let u = (0.5 + k as f64 * 0.618_033_988_749_895) % 1.0;
    let v = (0.5 + k as f64 * 0.754_877_666_246_693) % 1.0;
    (u, v)
}

fn sci(v: &[f64]) -> String {
    v.iter()
        .map(|x| format!("{x:.3e}"))
        .collect::<Vec<_>>()
        .join(", ")
}

fn c1(l: &mut Ledger) {
    let start = Instant::now();
    let r = solve_tstar();
    let dt = start.elapsed();
    l.result("1", r, |a| {
        let err = (a - A_STAR).abs();
        (
            err < 1e-11 && dt < Duration::from_secs(1),
            format!("a* = {a:.16} (|err| = {err:.2e}, {dt:.2?})"),
        )
    });
}

fn c2(l: &mut Ledger) {
    let start = Instant::now();
    let s2 = 2f64.sqrt();
    l.result(
        "2a",
        FamilyParams::new(s2, s2, 2.0).and_then(|p| conjugate_cell_ratio_ungated(&p)),
        |r| {
            let err = (r.ratio - 1.0).abs();
            (
                err < 1e-8,
                format!(
                    "anchor E/F(a=b=√2, t=2) = {:.15} (|E/F − 1| = {err:.2e}, tol 1e-8)",
                    r.ratio
                ),
            )
        },
    );
    let (a, b, t) = CUBIC_POINT;
    l.result(
        "2b",
        FamilyParams::new(a, b, t).and_then(|p| conjugate_cell_ratio_ungated(&p)),
        |r| {
            let err = (r.ratio - 1.0).abs();
            (
                err < 1e-8,
                format!(
                    "cubic anchor E/F(a=b=√3, t=3) = {:.15} (|E/F − 1| = {err:.2e}, tol 1e-8)",
                    r.ratio
                ),
            )
        },
    );
    let r = solve_tstar()
        .and_then(|s| FamilyParams::new(s, s, s * s))
        .and_then(|p| conjugate_cell_ratio(&p));
    let dt = start.elapsed();
    l.result("2c", r, |r| {
        let err = (r.ratio - EF_TD_STAR).abs();
        (
            err < 1e-6 && dt < Duration::from_secs(60),
            format!(
                "E/F(tD*) = {:.12} (|err| = {err:.2e}, tol 1e-6, {dt:.2?})",
                r.ratio
            ),
        )
    });
}

fn c3(l: &mut Ledger) {
    let start = Instant::now();
    let run = || -> Result<(f64, usize)> {
        let mut worst: f64 = 0.0;
        let mut n = 0;
        for i in 0..10 {
            let a = 1.1 + 3.9 * i as f64 / 9.0;
            for j in 0..10 {
                let t = a * (1.02 + 19.0 * (j as f64 / 9.0).powi(2));
                let q = edge_periods(&FamilyParams::new(a, a, t)?)?;
                let c = closed_form_periods_diagonal(a, t)?;
                for k in [0, 1, 3, 4] {
                    worst = worst.max(((q.i[k] - c.i[k]) / c.i[k]).abs());
                    worst = worst.max(((q.j[k] - c.j[k]) / c.j[k]).abs());
                }
                n += 1;
            }
        }
        Ok((worst, n))
    };
    let r = run();
    let dt = start.elapsed();
    l.result("3", r, |(w, n)| {
        (
            w < 1e-9 && dt < Duration::from_secs(120),
            format!("{n} grid points, worst relative error {w:.2e} (tol 1e-9, {dt:.2?})"),
        )
    });
}

fn c4(l: &mut Ledger) {
    let pts = [
        (1.5, 3.0),
        (2.0, 5.0),
        (2.5, 4.0),
        (3.0, 12.0),
        (1.3, 1.8),
        (4.0, 30.0),
    ];
    let combos = pts
        .iter()
        .map(|&(a, t)| derivative_deviation(a, t))
        .collect::<Result<Vec<_>>>();
    l.result("4a", combos, |v| {
        let w = v.into_iter().fold(0.0, f64::max);
        (w < 1e-6, format!("derivative combinations vs central differences (ε = 1e-5): worst {w:.2e} (tol 1e-6)"))
    });
    // first-order convergence of Q(a, a+ε; t)/ε to the closed form
    let run = || -> Result<(Vec<f64>, Vec<f64>)> {
        let (a, t) = (2.0, 5.0);
        let exact = dq_db_diagonal(a, t)?;
        let eps: Vec<f64> = (0..5).map(|k| 1e-2 / 2f64.powi(k)).collect();
        let errs = eps
            .iter()
            .map(|&e| Ok((q_value(a, a + e, t)? / e - exact).abs()))
            .collect::<Result<Vec<_>>>()?;
        let ratios = errs.windows(2).map(|w| w[0] / w[1]).collect();
        Ok((errs, ratios))
    };
    l.result("4b", run(), |(errs, ratios)| {
        let ok = ratios.iter().all(|r| (1.8..2.2).contains(r));
        (
            ok,
            format!(
                "Q(a,a+ε;t)/ε errors {}, halving ratios {ratios:.3?} (first order ⇒ ≈ 2)",
                sci(&errs)
            ),
        )
    });
}

fn c5(l: &mut Ledger) {
    let mut lines = Vec::new();
    let mut ok = true;
    let mut worst_q: f64 = 0.0;
    let mut unique = 0;
    for k in 0..20 {
        let (u, v) = sample(k);
        let a = 1.2 + 3.7 * u;
        let b = a + (5.0 - a) * (0.02 + 0.98 * v);
        let near = q_value(a, b, b * (1.0 + 1e-4));
        let far = q_value(a, b, 1e4 * b);
        let solved = solve_odelta(a, b, 1e-12);
        let roots = count_roots(a, b, 200);
        match (near, far, solved) {
            (Ok(qn), Ok(qf), Ok(s)) => {
                ok &= qn > 0.0 && qf < 0.0 && s.residual_q < 1e-10;
                worst_q = worst_q.max(s.residual_q);
                if let Ok(r) = &roots {
                    unique += (r.count == 1) as usize;
                }
                if !(qn > 0.0 && qf < 0.0) {
                    lines.push(format!(
                        "(a, b) = ({a:.4}, {b:.4}): Q near {qn:e}, Q far {qf:e}"
                    ));
                }
            }
            (n, f, s) => {
                ok = false;
                lines.push(format!(
                    "(a, b) = ({a:.4}, {b:.4}) failed: {:?} {:?} {:?}",
                    n.err(),
                    f.err(),
                    s.err().map(|e| e.to_string())
                ));
            }
        }
    }
    l.line(
        "5",
        ok,
        format!("20 samples: limit signs hold, worst |Q| at root {worst_q:.2e} (tol 1e-10); exactly one sign change on {unique}/20 (reported){}", lines.iter().map(|s| format!("; {s}")).collect::<String>()),
    );
}

fn c6(l: &mut Ledger) {
    let run = || -> Result<(f64, f64)> {
        let (mut worst, mut closest) = (0.0f64, f64::INFINITY);
        for k in 0..20 {
            let (u, v) = sample(k);
            let a = 1.05 + 4.0 * u;
            let t = a * (1.01 + 9.0 * v);
            worst = worst
                .max(antipodality_test(&FamilyParams::new(a, a, t)?.with_rho(1.0)?)?.pair_residual);
            let b = a + 0.05 + 3.0 * v;
            let t = b * (1.01 + 9.0 * u);
            closest = closest.min(antipodality_test(&FamilyParams::new(a, b, t)?)?.pair_residual);
        }
        Ok((worst, closest))
    };
    l.result("6", run(), |(w, c)| {
        (
            w < 1e-12 && c > 1e-6,
            format!("diagonal worst pair residual {w:.2e} (tol 1e-12); off-diagonal smallest {c:.2e} (must exceed 1e-6)"),
        )
    });
}

fn c7(l: &mut Ledger) {
    l.result("7a", boundary_curve(A_STAR), |p| {
        let err = (p.t - A_STAR * A_STAR).abs();
        (
            err < 1e-8,
            format!(
                "boundary_curve(a*) = {:.12} vs a*² = {:.12} (|err| = {err:.2e}, tol 1e-8)",
                p.t,
                A_STAR * A_STAR
            ),
        )
    });
    let run = || -> Result<Vec<(f64, f64)>> {
        [0.5, 0.2, 0.05]
            .iter()
            .map(|&d| Ok((A_STAR + d, solve_tdelta(A_STAR + d, 1e-12)?.params.a)))
            .collect()
    };
    l.result("7b", run(), |v| {
        let gaps: Vec<f64> = v.iter().map(|&(_, a)| (A_STAR - a).abs()).collect();
        let ok = gaps.windows(2).all(|w| w[1] < w[0]) && v.iter().all(|&(b, a)| a < b);
        (
            ok,
            format!(
                "(b, a) = {v:.6?}; |a − a*| = {} (monotone decreasing)",
                sci(&gaps)
            ),
        )
    });
}

fn c8(l: &mut Ledger) {
    let geometry = |label: &str, p: FamilyParams, l: &mut Ledger| {
        l.result(&format!("8{label}"), fundamental_hexagon(&p, 8), |mesh| {
            let res = boundary_residuals(&mesh);
            let cell = extend_to_lattice_cell(&mesh);
            match (res, cell) {
                (Ok(r), Ok(c)) => (
                    r.worst() < 1e-6 && c.weld_residual < 1e-8 && c.euler_characteristic == -4 && c.closed,
                    format!(
                        "a = {:.6}, b = {:.6}, t = {:.6}: boundary residual {:.2e}·diam (tol 1e-6), weld {:.2e} (tol 1e-8), χ = {} (closed: {})",
                        p.a, p.b, p.t, r.worst(), c.weld_residual, c.euler_characteristic, c.closed
                    ),
                ),
                (r, c) => (false, format!("{:?} / {:?}", r.err().map(|e| e.to_string()), c.err().map(|e| e.to_string()))),
            }
        });
    };
    match solve_odelta(2.0, 2.001, 1e-12) {
        Ok(s) => geometry("a", s.params, l),
        Err(e) => l.line("8a", false, format!("oΔ solve failed: {e}")),
    }
    let td = FamilyParams::new(2.0, 2.0, 4.0).and_then(|p| p.with_rho(solve_rho(&p)?));
    match td {
        Ok(p) => geometry("b", p, l),
        Err(e) => l.line("8b", false, format!("tD params failed: {e}")),
    }
}

fn c9(l: &mut Ledger) {
    let run = || -> Result<String> {
        let mut legendre: f64 = 0.0;
        for i in 1..1000 {
            let m = i as f64 / 1000.0;
            let lhs = ellip_k_bar(m)? * ellip_e(m)? + ellip_e_bar(m)? * ellip_k(m)?
                - ellip_k_bar(m)? * ellip_k(m)?;
            legendre = legendre.max((lhs - FRAC_PI_2).abs());
        }
        let mut f_pi: f64 = 0.0;
        for k in 0..10 {
            let a = 1.05 + 0.5 * k as f64;
            f_pi = f_pi.max((limit_f(a, a)? - PI).abs());
        }
        let (mut fg, mut denom, mut j5) = (true, true, true);
        for k in 0..20 {
            let (u, v) = sample(k);
            let a = 1.02 + 4.0 * u;
            let b = a + 0.01 + 4.0 * v;
            fg &= limit_f(a, b)? > limit_g(a, b)?;
            let t = 1e4;
            let e = edge_periods(&FamilyParams::new(a, b, t)?)?;
            denom &= t * e.i24() > t * e.j24();
            let (li, lj) = denominator_limits(a, b)?;
            denom &= li > lj;
            for t in [b * 1.01, b * 3.0, b * 100.0] {
                let e = edge_periods(&FamilyParams::new(a, b, t)?)?;
                j5 &= t * e.j[4] > j5_log_lower_bound(b, t);
            }
        }
        let ok = legendre < 1e-12 && f_pi < 1e-10 && fg && denom && j5;
        let s = format!(
            "Legendre {legendre:.2e} (tol 1e-12); |f(a,a) − π| {f_pi:.2e} (tol 1e-10); f > g: {fg}; denominator inequality at t = 1e4: {denom}; j5 bound: {j5}"
        );
        Ok(if ok { s } else { format!("!{s}") })
    };
    l.result("9", run(), |s| match s.strip_prefix('!') {
        Some(rest) => (false, rest.to_owned()),
        None => (true, s),
    });
}

fn main() {
    let mut l = Ledger { failed: Vec::new() };
    c1(&mut l);
    c2(&mut l);
    c3(&mut l);
    c4(&mut l);
    c5(&mut l);
    c6(&mut l);
    c7(&mut l);
    c8(&mut l);
    c9(&mut l);
    if l.failed.is_empty() {
        println!("acceptance: all criteria pass");
    } else {
        println!("acceptance: failing {:?}", l.failed);
        std::process::exit(1);
    }
}
