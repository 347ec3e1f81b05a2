//! Complete elliptic integrals in the parameter (`m = k²`) convention.
//!
//! ```text
//! K(m) = ∫₀^{π/2} (1 − m sin²θ)^{−1/2} dθ
//! E(m) = ∫₀^{π/2} (1 − m sin²θ)^{+1/2} dθ
//! K̄(m) = K(1 − m),   Ē(m) = E(1 − m)
//! ```
//!
//! All four are evaluated by the arithmetic–geometric mean. The barred
//! variants seed the iteration with `√m` directly, so `K̄(m)` and `Ē(m)` keep
//! full relative accuracy for tiny `m` where forming `1 − m` would round.

use serde::Serialize;
use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

const MAX_AGM_ITER: usize = 64;

/// Below this complementary parameter `E` switches to its logarithmic series.
const E_SERIES_THRESHOLD: f64 = 1e-4;

/// AGM over `(1, √mc)` with the auxiliary sequence seeded by `c₀² = m`.
///
/// Returns `(K, 1 − Σ 2^{n−1} c_n²)`; `E = K · second`. Both `m` and `mc`
/// must be supplied because for either close to 0 the other cannot be
/// recovered from it without cancellation.
fn agm(m: f64, mc: f64) -> Result<(f64, f64)> {
    let mut a = 1.0_f64;
    let mut b = mc.sqrt();
    let mut c2 = m;
    let mut pow = 0.5;
    let mut sum = pow * c2;
    for _ in 0..MAX_AGM_ITER {
        if (a - b).abs() <= f64::EPSILON * a {
            return Ok((FRAC_PI_2 / a, 1.0 - sum));
        }
        let a_next = 0.5 * (a + b);
        let b_next = (a * b).sqrt();
        // c_{n+1} = (a_n − b_n)/2 = c_n² / (4 a_{n+1}), written without cancellation
        c2 = c2 * c2 / (16.0 * a_next * a_next);
        pow *= 2.0;
        sum += pow * c2;
        a = a_next;
        b = b_next;
    }
    Err(Error::IterationLimit("arithmetic-geometric mean"))
}

fn check_param(m: f64, name: &str) -> Result<()> {
    if !(0.0..=1.0).contains(&m) {
        return Err(Error::domain(format!(
            "{name}: parameter m = {m} outside [0, 1]"
        )));
    }
    Ok(())
}

/// `K` from the parameter and its complement.
pub(crate) fn k_pair(m: f64, mc: f64) -> Result<f64> {
    if mc <= 0.0 {
        return Err(Error::domain("K diverges at m = 1"));
    }
    agm(m, mc).map(|(k, _)| k)
}

/// `E` from the parameter and its complement.
pub(crate) fn e_pair(m: f64, mc: f64) -> Result<f64> {
    if mc <= 0.0 {
        return Ok(1.0);
    }
    if mc < E_SERIES_THRESHOLD {
        return Ok(e_near_one(mc));
    }
    agm(m, mc).map(|(k, ratio)| k * ratio)
}

/// Logarithmic expansion of `E(1 − mc)` for small `mc`, truncated after the
/// `mc³` term (remainder `O(mc⁴ log mc)`).
fn e_near_one(mc: f64) -> f64 {
    let l = (4.0 / mc.sqrt()).ln();
    1.0 + 0.5 * mc * (l - 0.5)
        + 3.0 / 16.0 * mc * mc * (l - 13.0 / 12.0)
        + 15.0 / 128.0 * mc * mc * mc * (l - 6.0 / 5.0)
}

/// Complete elliptic integral of the first kind, `0 ≤ m < 1`.
pub fn ellip_k(m: f64) -> Result<f64> {
    check_param(m, "K")?;
    k_pair(m, 1.0 - m)
}

/// Complete elliptic integral of the second kind, `0 ≤ m ≤ 1`.
pub fn ellip_e(m: f64) -> Result<f64> {
    check_param(m, "E")?;
    e_pair(m, 1.0 - m)
}

/// `K̄(m) = K(1 − m)`, `0 < m ≤ 1`.
pub fn ellip_k_bar(m: f64) -> Result<f64> {
    check_param(m, "K̄")?;
    k_pair(1.0 - m, m)
}

/// `Ē(m) = E(1 − m)`, `0 ≤ m ≤ 1`.
pub fn ellip_e_bar(m: f64) -> Result<f64> {
    check_param(m, "Ē")?;
    e_pair(1.0 - m, m)
}

/// The two elliptic parameters attached to a point `(a, t)` of the `a = b`
/// locus.
///
/// Complements are kept alongside the parameters because `m₂` approaches 1
/// as `t → a` and `m₁` approaches 0 as `t → ∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModuliPair {
    pub m1: f64,
    pub m2: f64,
    /// `1 − m₁`
    pub m1c: f64,
    /// `1 − m₂`
    pub m2c: f64,
}

impl ModuliPair {
    pub fn k1(&self) -> Result<f64> {
        k_pair(self.m1, self.m1c)
    }
    pub fn k2(&self) -> Result<f64> {
        k_pair(self.m2, self.m2c)
    }
    pub fn e1(&self) -> Result<f64> {
        e_pair(self.m1, self.m1c)
    }
    pub fn e2(&self) -> Result<f64> {
        e_pair(self.m2, self.m2c)
    }
    pub fn k1_bar(&self) -> Result<f64> {
        k_pair(self.m1c, self.m1)
    }
    pub fn k2_bar(&self) -> Result<f64> {
        k_pair(self.m2c, self.m2)
    }
    pub fn e1_bar(&self) -> Result<f64> {
        e_pair(self.m1c, self.m1)
    }
    pub fn e2_bar(&self) -> Result<f64> {
        e_pair(self.m2c, self.m2)
    }
}

/// `m₁ = (a²−1)/(t²−1)`, `m₂ = (t²/a²)·(a²−1)/(t²−1)` for `1 < a < t`.
pub fn moduli_from_at(a: f64, t: f64) -> Result<ModuliPair> {
    if !(a.is_finite() && t.is_finite() && 1.0 < a && a < t) {
        return Err(Error::domain(format!(
            "moduli need 1 < a < t, got a = {a}, t = {t}"
        )));
    }
    let a2m1 = (a - 1.0) * (a + 1.0);
    let t2m1 = (t - 1.0) * (t + 1.0);
    let m1 = a2m1 / t2m1;
    let m1c = (t - a) * (t + a) / t2m1;
    let m2 = (t / a) * (t / a) * m1;
    let m2c = (t - a) * (t + a) / (a * a * t2m1);
    let pair = ModuliPair { m1, m2, m1c, m2c };
    debug_assert!(
        0.0 < m1 && m1 < m2 && m2 < 1.0,
        "moduli ordering violated: {pair:?}"
    );
    if !(0.0 < m1 && m1 < m2 && m2 < 1.0) {
        return Err(Error::domain(format!("moduli ordering violated: {pair:?}")));
    }
    Ok(pair)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    /// Trapezoidal rule over a full period of the even, π-periodic integrand.
    /// Converges geometrically for m < 1; doubled until two passes agree.
    fn trapezoid_oracle(m: f64, power: f64) -> f64 {
        let eval = |n: usize| {
            let h = 2.0 * PI / n as f64;
            (0..n)
                .map(|i| (1.0 - m * (i as f64 * h).sin().powi(2)).powf(power))
                .sum::<f64>()
                * h
                / 4.0
        };
        let mut n = 64;
        let mut prev = eval(n);
        loop {
            n *= 2;
            let next = eval(n);
            if (next - prev).abs() < 1e-15 * next || n > 1 << 20 {
                return next;
            }
            prev = next;
        }
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn endpoint_values() {
        assert_eq!(ellip_k(0.0).unwrap(), FRAC_PI_2);
        assert_eq!(ellip_e(0.0).unwrap(), FRAC_PI_2);
        assert_eq!(ellip_e(1.0).unwrap(), 1.0);
        assert_eq!(ellip_k_bar(1.0).unwrap(), FRAC_PI_2);
        assert_eq!(ellip_e_bar(1.0).unwrap(), FRAC_PI_2);
        assert_eq!(ellip_k_bar(0.3).unwrap(), ellip_k(0.7).unwrap());
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(ellip_k(1.0), Err(Error::Domain(_))));
        assert!(matches!(ellip_k(-0.1), Err(Error::Domain(_))));
        assert!(matches!(ellip_e(1.5), Err(Error::Domain(_))));
        assert!(matches!(ellip_k_bar(0.0), Err(Error::Domain(_))));
        assert!(ellip_k(f64::NAN).is_err());
        assert!(matches!(moduli_from_at(2.0, 1.5), Err(Error::Domain(_))));
        assert!(matches!(moduli_from_at(1.0, 1.5), Err(Error::Domain(_))));
    }

    #[test]
    fn matches_trapezoid_oracle() {
        for m in [0.05, 0.3, 0.5, 0.75, 0.95] {
            let k_ref = trapezoid_oracle(m, -0.5);
            let e_ref = trapezoid_oracle(m, 0.5);
            assert!(rel(ellip_k(m).unwrap(), k_ref) < 1e-13, "K({m})");
            assert!(rel(ellip_e(m).unwrap(), e_ref) < 1e-13, "E({m})");
        }
    }

    #[test]
    #[allow(clippy::excessive_precision)]
    fn high_precision_reference_values() {
        // 40-digit reference values at the exact binary parameters
        let table = [
            (0.1, 1.6124413487202194007, 1.5307576368977632002),
            (0.5, 1.8540746773013719184, 1.3506438810476755025),
            (0.9, 2.5780921133481732927, 1.1047747327040733079),
            (0.99, 3.6956373629898742386, 1.0159935450252239477),
            (0.999999, 8.2940514636010622019, 1.0000038970261721660),
        ];
        for (m, k, e) in table {
            assert!(rel(ellip_k(m).unwrap(), k) < 1e-14, "K({m})");
            assert!(rel(ellip_e(m).unwrap(), e) < 1e-14, "E({m})");
        }
        let mc = 2f64.powi(-40);
        assert!(rel(ellip_e(1.0 - mc).unwrap(), 1.0000000000067071769) < 1e-14);
        assert!(rel(ellip_k_bar(mc).unwrap(), 15.249237972322036709) < 1e-14);
        assert!(
            rel(
                ellip_e_bar(1e-20).unwrap(),
                1.0 + 0.5e-20 * ((4.0 / 1e-10f64).ln() - 0.5)
            ) < 1e-15
        );
    }

    #[test]
    fn logarithmic_growth_near_one() {
        let m = 1.0 - 1e-10;
        let mc = 1.0 - m;
        let k = ellip_k(m).unwrap();
        assert!(k.is_finite() && k > 10.0);
        // K(m) = ½ log(16/mc) + O(mc log mc)
        assert!((k - 0.5 * (16.0 / mc).ln()).abs() < 1e-8);
        assert!(rel(k, 12.899_219_785_017_416) < 1e-14);
    }

    #[test]
    fn series_and_agm_agree_at_switch() {
        let mc = E_SERIES_THRESHOLD;
        let (k, ratio) = agm(1.0 - mc, mc).unwrap();
        assert!(rel(k * ratio, e_near_one(mc)) < 5e-15);
    }

    #[test]
    fn moduli_examples() {
        let p = moduli_from_at(2f64.sqrt(), 2.0).unwrap();
        assert!((p.m1 - 1.0 / 3.0).abs() < 1e-15);
        assert!((p.m2 - 2.0 / 3.0).abs() < 1e-15);
        let near = moduli_from_at(1.0 + 1e-9, 3.0).unwrap();
        assert!(near.m1 < 1e-9 && near.m2 < 1e-8);
        for t in [1.5f64, 3.0, 10.0, 1e4] {
            let p = moduli_from_at(t.sqrt(), t).unwrap();
            assert!((p.m1 + p.m2 - 1.0).abs() < 1e-14, "t = {t}");
            assert!((p.m1 + p.m1c - 1.0).abs() < 1e-15);
            assert!((p.m2 + p.m2c - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn legendre_relation_on_grid() {
        for i in 1..100 {
            let m = i as f64 / 100.0;
            let lhs = ellip_k_bar(m).unwrap() * ellip_e(m).unwrap()
                + ellip_e_bar(m).unwrap() * ellip_k(m).unwrap()
                - ellip_k_bar(m).unwrap() * ellip_k(m).unwrap();
            assert!((lhs - FRAC_PI_2).abs() < 1e-12, "m = {m}: {lhs}");
        }
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn k_increasing_e_decreasing(m in 0.0f64..0.999, dm in 1e-6f64..1e-3) {
                let m2 = (m + dm).min(0.999_999);
                prop_assert!(ellip_k(m2).unwrap() > ellip_k(m).unwrap());
                prop_assert!(ellip_e(m2).unwrap() < ellip_e(m).unwrap());
            }

            #[test]
            fn moduli_ordered(a in 1.0001f64..10.0, dt in 1e-6f64..100.0) {
                let p = moduli_from_at(a, a + dt).unwrap();
                prop_assert!(0.0 < p.m1 && p.m1 < p.m2 && p.m2 < 1.0);
            }
        }
    }
}
