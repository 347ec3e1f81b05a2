//! Branched values of the Gauss map and the antipodality test.
//!
//! The Gauss map `G = iρ (z − v₂)^{−1/2} (z − v₅)^{1/2}` is branched over the
//! four parameters `±1, ±t`; its values there (with both sheets `±G`) are
//! projected to the unit sphere by inverse stereographic projection. The
//! surface belongs to the Meeks family iff these eight points split into four
//! antipodal pairs.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::periods::FamilyParams;

/// Branch parameter labels in the order points are stored.
pub const LABELS: [&str; 8] = [
    "+G(+1)", "-G(+1)", "+G(-1)", "-G(-1)", "+G(+t)", "-G(+t)", "+G(-t)", "-G(-t)",
];

/// Pair residual below which a matching counts as antipodal.
pub const MEEKS_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchValueSet {
    /// Unit vectors in the order of [`LABELS`].
    pub points: [[f64; 3]; 8],
    pub labels: [&'static str; 8],
    pub antipodal: bool,
    pub rho_used: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Meeks,
    NonMeeks,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AntipodalityReport {
    pub classification: Classification,
    /// Best perfect matching of the eight points (indices into [`LABELS`]).
    pub matching: [(usize, usize); 4],
    /// `max |p + q|` over the pairs of the best matching.
    pub pair_residual: f64,
    /// `ρ⁴` required by pairing the branch values over `±1`: `(a²−1)/(b²−1)`.
    pub rho4_unit: f64,
    /// `ρ⁴` required by pairing the branch values over `±t`: `(t²−a²)/(t²−b²)`.
    pub rho4_t: f64,
    /// `|rho4_unit − rho4_t|`
    pub rho4_discrepancy: f64,
    pub rho_used: f64,
}

/// `(2 re, 2 im, |w|² − 1)/(|w|² + 1)` written for `w = ±ρ√(num/den)` on
/// the real (`axis = 0`) or imaginary (`axis = 1`) axis, with the common
/// denominator cleared so that no square root is divided.
fn projected(sign: f64, rho: f64, num: f64, den: f64, axis: usize) -> [f64; 3] {
    let d = rho * rho * num + den;
    let mut p = [0.0; 3];
    p[axis] = sign * 2.0 * rho * (num * den).sqrt() / d;
    p[2] = (rho * rho * num - den) / d;
    p
}

/// The eight points `σ(±G(z))`, `z ∈ {+1, −1, +t, −t}`, using `ρ` from the
/// parameters (1 when unset).
pub fn branch_values(params: &FamilyParams) -> Result<BranchValueSet> {
    let (a, b, t) = (params.a, params.b, params.t);
    let rho = params.rho_or_one();
    let radicands = [
        a + 1.0,
        b - 1.0,
        a - 1.0,
        b + 1.0,
        t + a,
        t - b,
        t - a,
        t + b,
    ];
    if let Some(r) = radicands.iter().find(|r| !(**r > 0.0)) {
        return Err(Error::domain(format!(
            "non-positive radicand {r} in branch values"
        )));
    }
    let points = [
        projected(-1.0, rho, b - 1.0, a + 1.0, 0),
        projected(1.0, rho, b - 1.0, a + 1.0, 0),
        projected(-1.0, rho, b + 1.0, a - 1.0, 0),
        projected(1.0, rho, b + 1.0, a - 1.0, 0),
        projected(1.0, rho, t - b, t + a, 1),
        projected(-1.0, rho, t - b, t + a, 1),
        projected(1.0, rho, t + b, t - a, 1),
        projected(-1.0, rho, t + b, t - a, 1),
    ];
    let (_, residual) = best_matching(&points);
    Ok(BranchValueSet {
        points,
        labels: LABELS,
        antipodal: residual <= MEEKS_TOL,
        rho_used: rho,
    })
}

/// All 105 perfect matchings of eight items.
fn matchings() -> Vec<[(usize, usize); 4]> {
    fn rec(
        free: &mut Vec<usize>,
        cur: &mut Vec<(usize, usize)>,
        out: &mut Vec<[(usize, usize); 4]>,
    ) {
        if free.is_empty() {
            out.push([cur[0], cur[1], cur[2], cur[3]]);
            return;
        }
        let first = free.remove(0);
        for k in 0..free.len() {
            let partner = free.remove(k);
            cur.push((first, partner));
            rec(free, cur, out);
            cur.pop();
            free.insert(k, partner);
        }
        free.insert(0, first);
    }
    let mut out = Vec::with_capacity(105);
    rec(&mut (0..8).collect(), &mut Vec::new(), &mut out);
    out
}

/// Matching minimizing `max |p + q|`, found exhaustively.
pub fn best_matching(points: &[[f64; 3]; 8]) -> ([(usize, usize); 4], f64) {
    let pair = |i: usize, j: usize| {
        let (p, q) = (points[i], points[j]);
        ((p[0] + q[0]).powi(2) + (p[1] + q[1]).powi(2) + (p[2] + q[2]).powi(2)).sqrt()
    };
    matchings()
        .into_iter()
        .map(|m| {
            let r = m.iter().map(|&(i, j)| pair(i, j)).fold(0.0, f64::max);
            (m, r)
        })
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .expect("eight points always admit a matching")
}

/// Decides whether the branch values are antipodal by exhaustive matching.
pub fn antipodality_test(params: &FamilyParams) -> Result<AntipodalityReport> {
    let set = branch_values(params)?;
    let (matching, pair_residual) = best_matching(&set.points);
    let (a, b, t) = (params.a, params.b, params.t);
    let rho4_unit = (a - 1.0) * (a + 1.0) / ((b - 1.0) * (b + 1.0));
    let rho4_t = (t - a) * (t + a) / ((t - b) * (t + b));
    Ok(AntipodalityReport {
        classification: if pair_residual <= MEEKS_TOL {
            Classification::Meeks
        } else {
            Classification::NonMeeks
        },
        matching,
        pair_residual,
        rho4_unit,
        rho4_t,
        rho4_discrepancy: (rho4_unit - rho4_t).abs(),
        rho_used: set.rho_used,
    })
}
