//! Bounded search for the solutions of `F(x, y) = 1`.
//!
//! For each `y` in the search range the equation is a cubic in `x` whose
//! integer roots are extracted exactly, so `x` itself is unbounded. Real roots
//! of `F(t, 1)` seed the search (`x` is close to `t y`) but never decide it.
//!
//! When the Hessian is definite (`D > 0`) a bound on the point coordinate `X`
//! translates into an exact bound on `|y|`. Otherwise the range is a heuristic
//! and results are flagged as bound-limited.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};

use crate::arith::{cubic_integer_roots_big, cubic_integer_roots_i128, f64_to_ratio};
use crate::error::{Error, Result};
use crate::forms::BinaryCubicForm;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ThueSolution {
    pub x: BigInt,
    pub y: BigInt,
}

impl ThueSolution {
    pub fn new(x: impl Into<BigInt>, y: impl Into<BigInt>) -> Self {
        ThueSolution { x: x.into(), y: y.into() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundPolicy {
    /// Search `|y| <= y_bound` for every form.
    Explicit,
    /// Derive the range from `X_max = (hall_coeff |k|)^2`.
    HallDerived,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// The explicit range, and the floor of the heuristic range in hall mode.
    pub y_bound: u64,
    pub hall_coeff: f64,
    pub bound_policy: BoundPolicy,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { y_bound: 10_000, hall_coeff: 50.0, bound_policy: BoundPolicy::HallDerived }
    }
}

impl SolverConfig {
    pub fn explicit(y_bound: u64) -> Self {
        SolverConfig { y_bound, bound_policy: BoundPolicy::Explicit, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.y_bound == 0 {
            return Err(Error::Inconsistent("y_bound must be at least 1".into()));
        }
        if !(self.hall_coeff.is_finite() && self.hall_coeff > 0.0) {
            return Err(Error::Inconsistent(format!("hall_coeff must be positive, got {}", self.hall_coeff)));
        }
        Ok(())
    }
}

/// A `|y|` range and whether it provably covers every point with `X <= X_max`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchBound {
    pub y_max: BigInt,
    pub proven: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThueOutcome {
    pub solutions: Vec<ThueSolution>,
    pub bound: SearchBound,
}

impl ThueOutcome {
    pub fn bound_limited(&self) -> bool {
        !self.bound.proven
    }
}

/// `ceil((hall_coeff |k|)^2)`, computed exactly from the float's binary value.
pub fn x_max(k: &BigInt, cfg: &SolverConfig) -> BigInt {
    let (num, den) = f64_to_ratio(cfg.hall_coeff).expect("hall_coeff is finite");
    let top = &num * &num * k * k;
    let bottom = &den * &den;
    Integer::div_ceil(&top, &bottom)
}

/// The heuristic range `max(y_bound, ceil(hall_coeff |k|))` used when the Hessian is indefinite.
pub fn fallback_bound(k: &BigInt, cfg: &SolverConfig) -> BigInt {
    let root = x_max(k, cfg).sqrt();
    let root = if &root * &root == x_max(k, cfg) { root } else { root + 1 };
    root.max(BigInt::from(cfg.y_bound))
}

/// The `|y|` range searched for `form` in hall mode.
///
/// With `D > 0`, `H1(x, y) >= D1 y^2 / (4p)` where `p = b^2 - ac > 0`, so
/// `X <= X_max` forces `y^2 <= 4 p X_max / D1`. The `k` used for `X_max` is
/// `|D| / 108` (exact for forms of Mordell discriminant).
pub fn default_bound(form: &BinaryCubicForm, cfg: &SolverConfig) -> SearchBound {
    let d1 = form.reduced_discriminant();
    let top: BigInt = (&d1 * BigInt::from(27)).abs();
    let k = Integer::div_ceil(&top, &BigInt::from(108));
    let xm = x_max(&k, cfg);
    if d1.is_positive() {
        let p = &form.b * &form.b - &form.a * &form.c;
        debug_assert!(p.is_positive());
        let y_sq = (BigInt::from(4) * p * xm) / d1;
        SearchBound { y_max: y_sq.sqrt(), proven: true }
    } else {
        SearchBound { y_max: fallback_bound(&k, cfg), proven: false }
    }
}

/// Real roots of `a t^3 + 3b t^2 + 3c t + d`, approximately.
fn real_roots(form: &BinaryCubicForm) -> Vec<f64> {
    let c = [
        form.a.to_f64().unwrap_or(f64::NAN),
        3.0 * form.b.to_f64().unwrap_or(f64::NAN),
        3.0 * form.c.to_f64().unwrap_or(f64::NAN),
        form.d.to_f64().unwrap_or(f64::NAN),
    ];
    if c.iter().any(|v| !v.is_finite()) || c[0] == 0.0 {
        return Vec::new();
    }
    let f = |t: f64| ((c[0] * t + c[1]) * t + c[2]) * t + c[3];
    let radius = 2.0 * (c[1] / c[0]).abs().max((c[2] / c[0]).abs().sqrt()).max((c[3] / c[0]).abs().cbrt()) + 1.0;
    let mut cuts = vec![-radius];
    let dq = c[1] * c[1] - 3.0 * c[0] * c[2];
    if dq > 0.0 {
        let s = dq.sqrt();
        let mut r = [(-c[1] - s) / (3.0 * c[0]), (-c[1] + s) / (3.0 * c[0])];
        r.sort_by(|x, y| x.total_cmp(y));
        cuts.extend(r.iter().copied().filter(|x| x.abs() < radius));
    }
    cuts.push(radius);
    let mut out = Vec::new();
    for w in cuts.windows(2) {
        let (mut lo, mut hi) = (w[0], w[1]);
        let (flo, fhi) = (f(lo), f(hi));
        if flo == 0.0 {
            out.push(lo);
            continue;
        }
        if flo.signum() == fhi.signum() {
            continue;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if f(mid).signum() == flo.signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        out.push(0.5 * (lo + hi));
    }
    out
}

/// Integer `x` with `F(x, y) = 1` for one fixed `y != 0`.
fn solve_in_x(form: &BinaryCubicForm, small: Option<[i128; 4]>, y: i128, roots: &[f64]) -> Vec<BigInt> {
    if let Some([a, b, c, d]) = small {
        let coeffs = (|| {
            let c2 = 3i128.checked_mul(b)?.checked_mul(y)?;
            let c1 = 3i128.checked_mul(c)?.checked_mul(y)?.checked_mul(y)?;
            let c0 = d.checked_mul(y)?.checked_mul(y)?.checked_mul(y)?.checked_sub(1)?;
            Some((c2, c1, c0))
        })();
        if let Some((c2, c1, c0)) = coeffs {
            let yf = y as f64;
            let hints: Vec<f64> = roots.iter().map(|t| t * yf).collect();
            return cubic_integer_roots_i128(a, c2, c1, c0, &hints);
        }
    }
    let yb = BigInt::from(y);
    let three = BigInt::from(3);
    cubic_integer_roots_big(
        &form.a,
        &(&three * &form.b * &yb),
        &(&three * &form.c * &yb * &yb),
        &(&form.d * &yb * &yb * &yb - 1),
    )
}

/// All solutions of `F(x, y) = 1` with `|y| <= bound`, sorted.
pub fn solve_with_bound(form: &BinaryCubicForm, y_max: &BigInt) -> Result<Vec<ThueSolution>> {
    if !form.is_irreducible()? {
        return Err(Error::ReducibleForm);
    }
    let mut out = Vec::new();
    if form.a.is_one() {
        out.push(ThueSolution::new(1, 0));
    } else if form.a == BigInt::from(-1) {
        out.push(ThueSolution::new(-1, 0));
    }
    let Some(ymax) = y_max.to_i128() else {
        return Err(Error::Inconsistent(format!("y range {y_max} is beyond a feasible search")));
    };
    let small = (|| Some([form.a.to_i128()?, form.b.to_i128()?, form.c.to_i128()?, form.d.to_i128()?]))();
    let roots = real_roots(form);
    let one = BigInt::one();
    for y in 1..=ymax {
        for yy in [y, -y] {
            for x in solve_in_x(form, small, yy, &roots) {
                let yb = BigInt::from(yy);
                if form.evaluate(&x, &yb) != one || !x.gcd(&yb).is_one() {
                    return Err(Error::Inconsistent(format!("bad Thue solution ({x}, {yy}) for {form}")));
                }
                out.push(ThueSolution { x, y: yb });
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Solves `F(x, y) = 1` for an irreducible form within the configured range.
pub fn solve_thue(form: &BinaryCubicForm, cfg: &SolverConfig) -> Result<ThueOutcome> {
    cfg.validate()?;
    let bound = match cfg.bound_policy {
        BoundPolicy::Explicit => SearchBound { y_max: BigInt::from(cfg.y_bound), proven: false },
        BoundPolicy::HallDerived => default_bound(form, cfg),
    };
    let solutions = solve_with_bound(form, &bound.y_max)?;
    Ok(ThueOutcome { solutions, bound })
}
