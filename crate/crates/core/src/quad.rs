//! Tanh–sinh (double-exponential) quadrature for integrands with integrable
//! endpoint singularities.
//!
//! Nodes are handed to integrands as an [`Abscissa`], which carries the
//! distances to both interval ends computed without cancellation. Integrands
//! of the form `(x − p)^α (q − x)^β · g(x)` can therefore be evaluated at
//! nodes that lie much closer to an endpoint than `x` itself can resolve.

use num_complex::Complex64;
use std::f64::consts::FRAC_PI_2;
use std::ops::{Add, Mul, Sub};
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Default relative tolerance for period integrals.
pub const PERIOD_TOL: f64 = 1e-12;
/// Default relative tolerance for mesh path integrals.
pub const MESH_TOL: f64 = 1e-9;

const MAX_LEVEL: usize = 12;
const MIN_LEVEL: usize = 3;
/// Half-width of the truncated `s` range. At `s = 5.6` the node's distance
/// to the endpoint is ~1e−184 of the interval length, so even `x^{-1/2}`
/// tails beyond it are far below double precision.
const S_MAX: f64 = 5.6;

/// Values that can be integrated: reals, complex numbers and small vectors of
/// complex numbers (the three Weierstrass forms at once).
pub trait QuadValue:
    Copy + Send + Sync + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn zero() -> Self;
    /// Norm used for error control (any norm equivalent to the max-norm).
    fn norm(&self) -> f64;
    fn is_finite(&self) -> bool;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn norm(&self) -> f64 {
        self.abs()
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn norm(&self) -> f64 {
        self.re.abs() + self.im.abs()
    }
    fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// Three complex components, e.g. `(ω₁, ω₂, ω₃)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct C3(pub [Complex64; 3]);

impl Add for C3 {
    type Output = C3;
    fn add(self, o: C3) -> C3 {
        C3([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl Sub for C3 {
    type Output = C3;
    fn sub(self, o: C3) -> C3 {
        C3([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

impl Mul<f64> for C3 {
    type Output = C3;
    fn mul(self, s: f64) -> C3 {
        C3([self.0[0] * s, self.0[1] * s, self.0[2] * s])
    }
}

impl QuadValue for C3 {
    fn zero() -> Self {
        C3([Complex64::new(0.0, 0.0); 3])
    }
    fn norm(&self) -> f64 {
        self.0.iter().map(QuadValue::norm).sum()
    }
    fn is_finite(&self) -> bool {
        self.0.iter().all(QuadValue::is_finite)
    }
}

/// A quadrature node inside `(p, q)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Abscissa {
    /// The node itself; may round to an endpoint.
    pub x: f64,
    /// `x − p`, accurate to full relative precision.
    pub from_left: f64,
    /// `q − x`, accurate to full relative precision.
    pub from_right: f64,
}

/// An integrand `g(x) · (x − p)^α · (q − x)^β` on `(p, q)`, where `g`
/// ("regular") is smooth on the closed interval.
pub struct SingularIntegrand<F> {
    pub p: f64,
    pub q: f64,
    /// `α`
    pub left_exponent: f64,
    /// `β`
    pub right_exponent: f64,
    pub regular: F,
}

impl<F> SingularIntegrand<F> {
    pub fn new(p: f64, q: f64, left_exponent: f64, right_exponent: f64, regular: F) -> Self {
        SingularIntegrand {
            p,
            q,
            left_exponent,
            right_exponent,
            regular,
        }
    }

    /// Full integrand value at an interior node.
    pub fn evaluate<T: QuadValue>(&self, at: &Abscissa) -> T
    where
        F: Fn(&Abscissa) -> T,
    {
        (self.regular)(at)
            * (pow(at.from_left, self.left_exponent) * pow(at.from_right, self.right_exponent))
    }
}

#[inline]
fn pow(d: f64, e: f64) -> f64 {
    if e == 0.0 {
        1.0
    } else if e == -0.5 {
        1.0 / d.sqrt()
    } else if e == 0.5 {
        d.sqrt()
    } else {
        d.powf(e)
    }
}

/// One node pair `±s` on the reference interval `(−1, 1)`.
#[derive(Debug, Clone, Copy)]
struct Node {
    /// `1 − u` for the node `u = tanh(π/2 · sinh s) > 0`.
    near: f64,
    /// `1 + u`.
    far: f64,
    /// `du/ds`.
    weight: f64,
}

struct Table {
    /// `levels[0]` holds the integer nodes `s = 1, 2, …`; level `ℓ ≥ 1` holds
    /// the odd multiples of `2^{−ℓ}`. The centre node `s = 0` is implicit.
    levels: Vec<Vec<Node>>,
}

fn node(s: f64) -> Node {
    let w = FRAC_PI_2 * s.sinh();
    let e = (-2.0 * w).exp();
    let denom = 1.0 + e;
    Node {
        near: 2.0 * e / denom,
        far: 2.0 / denom,
        weight: FRAC_PI_2 * s.cosh() * 4.0 * e / (denom * denom),
    }
}

fn table() -> &'static Table {
    static TABLE: OnceLock<Table> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut levels = Vec::with_capacity(MAX_LEVEL + 1);
        levels.push(
            (1..)
                .map(|k| k as f64)
                .take_while(|&s| s <= S_MAX)
                .map(node)
                .collect(),
        );
        for level in 1..=MAX_LEVEL {
            let h = 0.5f64.powi(level as i32);
            levels.push(
                (0..)
                    .map(|k| (2 * k + 1) as f64 * h)
                    .take_while(|&s| s <= S_MAX)
                    .map(node)
                    .collect(),
            );
        }
        Table { levels }
    })
}

/// Integrates `f` over `(p, q)` to relative accuracy `tol` (measured against
/// `∫|f|`). The integrand is never evaluated at `p` or `q`.
pub fn integrate<T, F>(p: f64, q: f64, tol: f64, f: F) -> Result<T>
where
    T: QuadValue,
    F: Fn(&Abscissa) -> T,
{
    if !(tol > 0.0) {
        return Err(Error::Input(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    if !(p.is_finite() && q.is_finite() && p < q) {
        return Err(Error::Input(format!("invalid interval ({p}, {q})")));
    }
    let half = 0.5 * (q - p);
    let eval = |from_left: f64, from_right: f64| -> Result<Option<T>> {
        if from_left <= 0.0 || from_right <= 0.0 {
            // Underflowed node; its weight is negligible.
            return Ok(None);
        }
        let x = if from_left <= from_right {
            p + from_left
        } else {
            q - from_right
        };
        let v = f(&Abscissa {
            x,
            from_left,
            from_right,
        });
        if !v.is_finite() {
            return Err(Error::Input(format!(
                "integrand is not finite at x = {x:e}"
            )));
        }
        Ok(Some(v))
    };
    let level_sum = |nodes: &[Node]| -> Result<(T, f64)> {
        let mut sum = T::zero();
        let mut abs = 0.0;
        for n in nodes {
            for (l, r) in [(half * n.far, half * n.near), (half * n.near, half * n.far)] {
                if let Some(v) = eval(l, r)? {
                    abs += v.norm() * n.weight;
                    sum = sum + v * n.weight;
                }
            }
        }
        Ok((sum, abs))
    };

    let centre = eval(half, half)?.unwrap_or_else(T::zero);
    let table = table();
    let (s0, a0) = level_sum(&table.levels[0])?;
    let mut sum = centre * FRAC_PI_2 + s0;
    let mut abs = centre.norm() * FRAC_PI_2 + a0;
    let mut h = 1.0;
    let mut estimate = sum * (h * half);
    let mut error = f64::INFINITY;
    for level in 1..=MAX_LEVEL {
        let (s, a) = level_sum(&table.levels[level])?;
        sum = sum + s;
        abs += a;
        h *= 0.5;
        let next = sum * (h * half);
        error = (next - estimate).norm();
        estimate = next;
        if level >= MIN_LEVEL && error <= tol * abs * h * half {
            return Ok(estimate);
        }
    }
    Err(Error::Accuracy {
        estimate: estimate.norm(),
        error,
        edge: None,
    })
}

/// Integrates a [`SingularIntegrand`] over its interval.
pub fn integrate_singular<T, F>(f: &SingularIntegrand<F>, tol: f64) -> Result<T>
where
    T: QuadValue,
    F: Fn(&Abscissa) -> T,
{
    integrate(f.p, f.q, tol, |at| f.evaluate(at))
}

const TAIL_CUTOFF: f64 = 1e-100;

/// Direction of an unbounded integration range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tail {
    /// `(p, +∞)`
    Up,
    /// `(−∞, p)`
    Down,
}

/// Integrates over `(p, ∞)` or `(−∞, p)`. The integrand receives the offset
/// `d = |z − p| > 0` (so a singularity at `p` is resolved accurately) and
/// must decay at least like `d^{−3/2}`. Uses `d = s/(1 − s)` on `s ∈ (0, 1)`.
pub fn integrate_improper_tail<T, F>(p: f64, tail: Tail, tol: f64, f: F) -> Result<T>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    let _ = tail; // the orientation only matters to the caller's integrand
    check_decay(p, &f)?;
    integrate(0.0, 1.0, tol, |at| {
        if at.from_right < TAIL_CUTOFF {
            // beyond d ≈ 10¹⁰⁰ the decaying integrand contributes nothing
            return T::zero();
        }
        let d = at.from_left / at.from_right;
        let jac = 1.0 / (at.from_right * at.from_right);
        f(d) * jac
    })
}

/// Rejects integrands for which `|f(d)|·d^{3/2}` grows between `d = 10⁶` and
/// `d = 10⁸` (in units of `max(1, |p|)`).
fn check_decay<T: QuadValue, F: Fn(f64) -> T>(p: f64, f: &F) -> Result<()> {
    let scale = p.abs().max(1.0);
    let probe = |d: f64| f(d).norm() * d.powf(1.5);
    let (near, far) = (probe(1e6 * scale), probe(1e8 * scale));
    if !(near.is_finite() && far.is_finite()) {
        return Err(Error::Input(
            "integrand is not finite far out on the tail".into(),
        ));
    }
    if far > 3.0 * near && far > 0.0 {
        return Err(Error::Input(format!(
            "integrand does not decay like |z|^(-3/2): |f|·d^1.5 grows from {near:e} to {far:e}"
        )));
    }
    Ok(())
}
