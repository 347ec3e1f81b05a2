//! Weierstrass data, edge periods and the period quotient.
//!
//! The hexagon vertices are the real parameters `v = (−t, −a, −1, 1, b, t)`.
//! On the upper half-plane
//!
//! ```text
//! φ₁ =  ρ   ∏ (z − v_j)^{e_j},   e = (−½, −½, −½, −½, +½, −½)
//! φ₂ = −ρ⁻¹ ∏ (z − v_j)^{f_j},   f = (−½, +½, −½, −½, −½, −½)
//! dh = −i   ∏ (z − v_j)^{h_j},   h = (−½,  0, −½, −½,  0, −½)
//! ```
//!
//! with the principal branch `arg(z − v_j) ∈ [0, π]`. The edge periods are
//! `I_k = ∫_{v_k}^{v_{k+1}} |φ₁|`, `J_k = ∫_{v_k}^{v_{k+1}} |φ₂|` at `ρ = 1`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result, Warning};
use crate::quad::{self, Abscissa, SingularIntegrand, Tail, PERIOD_TOL};
use crate::specfun::moduli_from_at;

pub const EXP_PHI1: [f64; 6] = [-0.5, -0.5, -0.5, -0.5, 0.5, -0.5];
pub const EXP_PHI2: [f64; 6] = [-0.5, 0.5, -0.5, -0.5, -0.5, -0.5];
pub const EXP_DH: [f64; 6] = [-0.5, 0.0, -0.5, -0.5, 0.0, -0.5];

/// Gap below which two adjacent branch parameters are considered nearly
/// coalesced.
const COALESCENCE_GAP: f64 = 1e-6;

/// One point `(a, b, t)` of the moduli space, plus the López-Ros factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FamilyParams {
    pub a: f64,
    pub b: f64,
    pub t: f64,
    /// López-Ros factor; `None` until the period problem has been solved.
    pub rho: Option<f64>,
    /// Set when the input had `a > b` and was swapped.
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub canonicalized: bool,
}

impl FamilyParams {
    /// Admissible parameters in canonical orientation `a ≤ b`; swaps (and
    /// inverts `ρ` on later solve) if necessary.
    pub fn new(a: f64, b: f64, t: f64) -> Result<Self> {
        let mut p = Self::raw(a, b, t)?;
        if a > b {
            p.a = b;
            p.b = a;
            p.canonicalized = true;
        }
        Ok(p)
    }

    /// Admissible parameters without canonicalization (`a > b` allowed).
    pub fn raw(a: f64, b: f64, t: f64) -> Result<Self> {
        let ok = [a, b, t].iter().all(|v| v.is_finite()) && 1.0 < a && 1.0 < b && a < t && b < t;
        if !ok {
            return Err(Error::domain(format!(
                "need 1 < a, b < t; got a = {a}, b = {b}, t = {t}"
            )));
        }
        Ok(FamilyParams {
            a,
            b,
            t,
            rho: None,
            canonicalized: false,
        })
    }

    pub fn with_rho(mut self, rho: f64) -> Result<Self> {
        if !(rho.is_finite() && rho > 0.0) {
            return Err(Error::domain(format!(
                "López-Ros factor must be positive, got {rho}"
            )));
        }
        self.rho = Some(rho);
        Ok(self)
    }

    /// `ρ`, defaulting to 1.
    pub fn rho_or_one(&self) -> f64 {
        self.rho.unwrap_or(1.0)
    }

    pub fn vertices(&self) -> [f64; 6] {
        [-self.t, -self.a, -1.0, 1.0, self.b, self.t]
    }

    pub fn is_diagonal(&self) -> bool {
        self.a == self.b
    }

    pub fn is_tetragonal(&self, tol: f64) -> bool {
        (self.a * self.b - self.t).abs() <= tol * self.t
    }

    /// Conditioning warnings for nearly coalescing branch parameters.
    pub fn warnings(&self) -> Vec<Warning> {
        let mut w = Vec::new();
        for (which, gap) in [
            ("a-1", self.a - 1.0),
            ("b-1", self.b - 1.0),
            ("t-a", self.t - self.a),
            ("t-b", self.t - self.b),
        ] {
            if gap < COALESCENCE_GAP {
                w.push(Warning::NearCoalescence { which, gap });
            }
        }
        w
    }
}

/// The three Weierstrass forms and the Gauss map for a given parameter
/// point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeierstrassData {
    pub params: FamilyParams,
    pub rho: f64,
}

/// Principal square root on the closed upper half-plane (`−0` imaginary
/// parts are treated as `+0` so negative reals map to `+i·√|x|`).
#[inline]
fn sqrt_uhp(d: Complex64) -> Complex64 {
    Complex64::new(d.re, d.im + 0.0).sqrt()
}

impl WeierstrassData {
    pub fn new(params: FamilyParams) -> Self {
        WeierstrassData {
            params,
            rho: params.rho_or_one(),
        }
    }

    /// `z − v_j` for all six vertices.
    pub fn diffs(&self, z: Complex64) -> [Complex64; 6] {
        self.params.vertices().map(|v| z - v)
    }

    /// `(φ₁, φ₂, dh)` from the differences `z − v_j`.
    pub fn forms_from_diffs(&self, d: &[Complex64; 6]) -> [Complex64; 3] {
        let s = d.map(sqrt_uhp);
        let p = (s[0] * s[2] * s[3] * s[5]).inv();
        let r = s[4] / s[1];
        let phi1 = p * r * self.rho;
        let phi2 = -p / (r * self.rho);
        let dh = Complex64::new(0.0, -1.0) * p;
        [phi1, phi2, dh]
    }

    /// `(ω₁, ω₂, ω₃) = (½(φ₂ − φ₁), (i/2)(φ₂ + φ₁), dh)` from `z − v_j`.
    pub fn omega_from_diffs(&self, d: &[Complex64; 6]) -> [Complex64; 3] {
        let [phi1, phi2, dh] = self.forms_from_diffs(d);
        [
            0.5 * (phi2 - phi1),
            Complex64::new(0.0, 0.5) * (phi2 + phi1),
            dh,
        ]
    }

    pub fn phi1(&self, z: Complex64) -> Complex64 {
        self.forms_from_diffs(&self.diffs(z))[0]
    }

    pub fn phi2(&self, z: Complex64) -> Complex64 {
        self.forms_from_diffs(&self.diffs(z))[1]
    }

    pub fn dh(&self, z: Complex64) -> Complex64 {
        self.forms_from_diffs(&self.diffs(z))[2]
    }

    pub fn omega(&self, z: Complex64) -> [Complex64; 3] {
        self.omega_from_diffs(&self.diffs(z))
    }

    /// `G = iρ (z − v₂)^{−1/2} (z − v₅)^{1/2}`.
    pub fn gauss(&self, z: Complex64) -> Complex64 {
        let d = self.diffs(z);
        Complex64::new(0.0, self.rho) * sqrt_uhp(d[4]) / sqrt_uhp(d[1])
    }
}

/// Edge periods at `ρ = 1`: `i[k]` is `I_{k+1}`, `j[k]` is `J_{k+1}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgePeriods {
    #[serde(rename = "I")]
    pub i: [f64; 5],
    #[serde(rename = "J")]
    pub j: [f64; 5],
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<Warning>,
}

impl EdgePeriods {
    /// `I₁ + I₅`
    pub fn i15(&self) -> f64 {
        self.i[0] + self.i[4]
    }
    /// `I₂ + I₄`
    pub fn i24(&self) -> f64 {
        self.i[1] + self.i[3]
    }
    /// `J₁ + J₅`
    pub fn j15(&self) -> f64 {
        self.j[0] + self.j[4]
    }
    /// `J₂ + J₄`
    pub fn j24(&self) -> f64 {
        self.j[1] + self.j[3]
    }
    pub fn q_i(&self) -> f64 {
        self.i15() / self.i24()
    }
    pub fn q_j(&self) -> f64 {
        self.j15() / self.j24()
    }
    /// `Q = Q_I − Q_J`
    pub fn q(&self) -> f64 {
        self.q_i() - self.q_j()
    }
}

/// `∫_{v_k}^{v_{k+1}} ∏_j |x − v_j|^{e_j} dx` for the 0-based edge `k < 5`.
pub(crate) fn real_edge_integral(
    params: &FamilyParams,
    exps: &[f64; 6],
    k: usize,
    tol: f64,
) -> Result<f64> {
    let v = params.vertices();
    let (p, q) = (v[k], v[k + 1]);
    let regular = |at: &Abscissa| -> f64 {
        let mut prod = 1.0;
        for (j, &e) in exps.iter().enumerate() {
            if e == 0.0 || j == k || j == k + 1 {
                continue;
            }
            let dist = if j < k {
                (p - v[j]) + at.from_left
            } else {
                (v[j] - q) + at.from_right
            };
            prod *= match e {
                -0.5 => 1.0 / dist.sqrt(),
                0.5 => dist.sqrt(),
                e => dist.powf(e),
            };
        }
        prod
    };
    let f = SingularIntegrand::new(p, q, exps[k], exps[k + 1], regular);
    quad::integrate_singular(&f, tol).map_err(|e| e.on_edge(k + 1))
}

/// All ten edge periods plus `I₃`, `J₃`, at `ρ = 1`.
pub fn edge_periods(params: &FamilyParams) -> Result<EdgePeriods> {
    edge_periods_tol(params, PERIOD_TOL)
}

pub fn edge_periods_tol(params: &FamilyParams, tol: f64) -> Result<EdgePeriods> {
    let mut i = [0.0; 5];
    let mut j = [0.0; 5];
    for k in 0..5 {
        i[k] = real_edge_integral(params, &EXP_PHI1, k, tol)?;
        j[k] = real_edge_integral(params, &EXP_PHI2, k, tol)?;
    }
    Ok(EdgePeriods {
        i,
        j,
        warnings: params.warnings(),
    })
}

/// Period quotient `Q(a, b; t) = (I₁+I₅)/(I₂+I₄) − (J₁+J₅)/(J₂+J₄)`.
pub fn q_value(a: f64, b: f64, t: f64) -> Result<f64> {
    Ok(edge_periods(&FamilyParams::new(a, b, t)?)?.q())
}

/// Relative tolerance on the second period condition checked by
/// [`solve_rho`].
pub const RHO_CONSISTENCY_TOL: f64 = 1e-9;

/// López-Ros factor closing both period conditions, `ρ = √((J₁+J₅)/(I₁+I₅))`.
pub fn solve_rho(params: &FamilyParams) -> Result<f64> {
    let e = edge_periods(params)?;
    rho_from_periods(&e)
}

pub(crate) fn rho_from_periods(e: &EdgePeriods) -> Result<f64> {
    let rho = (e.j15() / e.i15()).sqrt();
    let residual = (rho * rho * e.i24() / e.j24() - 1.0).abs();
    if residual > RHO_CONSISTENCY_TOL {
        return Err(Error::Inconsistent {
            residual,
            tolerance: RHO_CONSISTENCY_TOL,
        });
    }
    Ok(rho)
}

/// Relative residuals of the two period conditions after rescaling by `ρ`.
pub fn period_residuals(e: &EdgePeriods, rho: f64) -> (f64, f64) {
    let r1 = (rho * e.i15() - e.j15() / rho).abs() / (e.j15() / rho);
    let r2 = (rho * e.i24() - e.j24() / rho).abs() / (e.j24() / rho);
    (r1, r2)
}

/// Closed forms of the periods on the diagonal `a = b` in terms of complete
/// elliptic integrals.
pub fn closed_form_periods_diagonal(a: f64, t: f64) -> Result<EdgePeriods> {
    let m = moduli_from_at(a, t)?;
    let s = ((t - 1.0) * (t + 1.0)).sqrt();
    let (k1, k2) = (m.k1()?, m.k2()?);
    let (kb1, kb2) = (m.k1_bar()?, m.k2_bar()?);
    let i1 = (kb1 + kb2) / s;
    let i2 = (k1 + k2) / s;
    let i3 = 2.0 * kb2 / s;
    let i4 = (k2 - k1) / s;
    let i5 = (kb1 - kb2) / s;
    let i = [i1, i2, i3, i4, i5];
    let mut j = i;
    j.reverse();
    Ok(EdgePeriods {
        i,
        j,
        warnings: FamilyParams::new(a, a, t)?.warnings(),
    })
}

/// `b`-derivatives of the periods at `a = b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiagonalDerivatives {
    /// `(I′₁, I′₂, I′₄, I′₅)`
    pub d_i: [f64; 4],
    /// `(J′₁, J′₂, J′₄, J′₅)`
    pub d_j: [f64; 4],
    pub d_i15: f64,
    pub d_i24: f64,
    pub d_j15: f64,
    pub d_j24: f64,
    /// `∂Q/∂b` at `a = b`.
    pub dq_db: f64,
}

pub fn diagonal_derivatives(a: f64, t: f64) -> Result<DiagonalDerivatives> {
    let m = moduli_from_at(a, t)?;
    let s = ((t - 1.0) * (t + 1.0)).sqrt();
    let (k1, k2, e1, e2) = (m.k1()?, m.k2()?, m.e1()?, m.e2()?);
    let (kb1, kb2, eb1, eb2) = (m.k1_bar()?, m.k2_bar()?, m.e1_bar()?, m.e2_bar()?);
    let a2m1 = (a - 1.0) * (a + 1.0);
    let t2ma2 = (t - a) * (t + a);

    let i1 = kb2 / (2.0 * a * s);
    let i2 = k2 / (2.0 * a * s);
    let d_i = [i1, i2, i2, -i1];

    let c_k = a / (s * t2ma2);
    let c_kk = a / (s * a2m1);
    let c_e = s * a / (t2ma2 * a2m1);
    let j1 = -kb2 / (2.0 * a * s) - c_k * (kb2 - kb1) + c_e * (eb2 - eb1);
    let j2 = k2 / (2.0 * a * s) - c_kk * (k2 - k1) + c_e * (e2 - e1);
    let j4 = k2 / (2.0 * a * s) - c_kk * (k1 + k2) + c_e * (e1 + e2);
    let j5 = kb2 / (2.0 * a * s) + c_k * (kb1 + kb2) - c_e * (eb1 + eb2);
    let d_j = [j1, j2, j4, j5];

    let d_i15 = 0.0;
    let d_i24 = k2 / (a * s);
    let d_j15 = 2.0 * a * kb1 / (s * t2ma2) - 2.0 * a * eb1 * s / (a2m1 * t2ma2);
    let d_j24 = k2 / (a * s) - 2.0 * a * k2 / (s * a2m1) + 2.0 * a * e2 * s / (a2m1 * t2ma2);

    Ok(DiagonalDerivatives {
        d_i,
        d_j,
        d_i15,
        d_i24,
        d_j15,
        d_j24,
        dq_db: dq_db_diagonal(a, t)?,
    })
}

/// Numerator of `∂Q/∂b` at `a = b`:
/// `K̄(m₁)E(m₂) + Ē(m₁)K(m₂) − K̄(m₁)K(m₂)`. Its zero set is the
/// intersection of the two orthorhombic families.
pub fn intersection_residual(a: f64, t: f64) -> Result<f64> {
    let m = moduli_from_at(a, t)?;
    let (kb1, eb1, k2, e2) = (m.k1_bar()?, m.e1_bar()?, m.k2()?, m.e2()?);
    Ok(kb1 * e2 + eb1 * k2 - kb1 * k2)
}

/// `∂Q/∂b (a, a; t)`, the analytic extension of `Q/(b − a)` to the diagonal.
///
/// Equals `a(t²−1)/((a²−1)(t²−a²)) · [K̄(m₁)E(m₂) + Ē(m₁)K(m₂) − K̄(m₁)K(m₂)] / K(m₂)²`.
pub fn dq_db_diagonal(a: f64, t: f64) -> Result<f64> {
    let m = moduli_from_at(a, t)?;
    let k2 = m.k2()?;
    let pref = a * (t - 1.0) * (t + 1.0) / ((a - 1.0) * (a + 1.0) * (t - a) * (t + a));
    Ok(pref * intersection_residual(a, t)? / (k2 * k2))
}

/// `f(a, b) = lim_{t→∞} t·(I₂ − J₂) = ∫₁^a (2z − a + b)/√((z²−1)(a−z)(b+z)) dz`.
pub fn limit_f(a: f64, b: f64) -> Result<f64> {
    if !(a > 1.0 && b > 1.0) {
        return Err(Error::domain("f(a, b) needs a, b > 1"));
    }
    let f = SingularIntegrand::new(1.0, a, -0.5, -0.5, |at: &Abscissa| {
        (2.0 * at.x - a + b) / ((at.x + 1.0) * (b + at.x)).sqrt()
    });
    quad::integrate_singular(&f, PERIOD_TOL)
}

/// `g(a, b) = lim_{t→∞} t·(J₄ − I₄) = f(b, a)`.
pub fn limit_g(a: f64, b: f64) -> Result<f64> {
    limit_f(b, a)
}

/// `lim_{t→∞} t·(I₂+I₄)` and `lim_{t→∞} t·(J₂+J₄)`.
pub fn denominator_limits(a: f64, b: f64) -> Result<(f64, f64)> {
    let i2 = quad::integrate_singular(
        &SingularIntegrand::new(-a, -1.0, -0.5, -0.5, |at: &Abscissa| {
            ((b - at.x) / (1.0 - at.x)).sqrt()
        }),
        PERIOD_TOL,
    )?;
    let j2 = quad::integrate_singular(
        &SingularIntegrand::new(-a, -1.0, 0.5, -0.5, |at: &Abscissa| {
            1.0 / ((b - at.x) * (1.0 - at.x)).sqrt()
        }),
        PERIOD_TOL,
    )?;
    let i4 = quad::integrate_singular(
        &SingularIntegrand::new(1.0, b, -0.5, 0.5, |at: &Abscissa| {
            1.0 / ((at.x + 1.0) * (a + at.x)).sqrt()
        }),
        PERIOD_TOL,
    )?;
    let j4 = quad::integrate_singular(
        &SingularIntegrand::new(1.0, b, -0.5, -0.5, |at: &Abscissa| {
            ((a + at.x) / (at.x + 1.0)).sqrt()
        }),
        PERIOD_TOL,
    )?;
    Ok((i2 + i4, j2 + j4))
}

/// `lim_{t→∞} t·(I₅ − J₅) = −∫_b^∞ (a+b)/(√(z²−1)√(z−b)√(z+a)) dz`.
pub fn limit_t_i5_minus_j5(a: f64, b: f64) -> Result<f64> {
    let v: f64 = quad::integrate_improper_tail(b, Tail::Up, PERIOD_TOL, |d| {
        let z = b + d;
        (a + b) / (((z - 1.0) * (z + 1.0)).sqrt() * d.sqrt() * (z + a).sqrt())
    })?;
    Ok(-v)
}

/// Lower bound `log((√(t²−b²) + t)/b)` for `t·J₅(a, b; t)`.
pub fn j5_log_lower_bound(b: f64, t: f64) -> f64 {
    ((((t - b) * (t + b)).sqrt() + t) / b).ln()
}
