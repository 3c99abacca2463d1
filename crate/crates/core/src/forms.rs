//! Binary cubic forms `a x^3 + 3b x^2 y + 3c x y^2 + d y^3` and their covariants.
//!
//! Coefficients are stored without the factors of 3 on the middle terms, so
//! `(1, 0, -2, 6)` is the form `x^3 - 6 x y^2 + 6 y^3`. All arithmetic is
//! exact.
//!
//! Covariants are stored scaled: [`HessianForm`] is `H/9` and
//! [`CubicCovariant`] is `G/27`, so that the syzygy reads
//! `4 H1^3 = G1^2 + D1 F^2` with `D1 = D/27`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith;
use crate::error::{Error, Result};

/// The cubic form `a x^3 + 3b x^2 y + 3c x y^2 + d y^3`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinaryCubicForm {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub d: BigInt,
}

/// The Hessian covariant scaled by 1/9: `p x^2 + q x y + r y^2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HessianForm {
    pub p: BigInt,
    pub q: BigInt,
    pub r: BigInt,
}

/// The cubic covariant scaled by 1/27: `a1 x^3 + 3 b1 x^2 y + 3 c1 x y^2 + d1 y^3`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CubicCovariant {
    pub a1: BigInt,
    pub b1: BigInt,
    pub c1: BigInt,
    pub d1: BigInt,
}

/// An integer matrix `(alpha, beta; gamma, delta)` of determinant +1 or -1.
///
/// Acting on a form it substitutes `(x, y) -> (alpha x + beta y, gamma x + delta y)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UnimodularMap {
    alpha: BigInt,
    beta: BigInt,
    gamma: BigInt,
    delta: BigInt,
}

impl UnimodularMap {
    pub fn new(
        alpha: impl Into<BigInt>,
        beta: impl Into<BigInt>,
        gamma: impl Into<BigInt>,
        delta: impl Into<BigInt>,
    ) -> Result<Self> {
        let m = UnimodularMap {
            alpha: alpha.into(),
            beta: beta.into(),
            gamma: gamma.into(),
            delta: delta.into(),
        };
        let det = m.det_value();
        if det.abs().is_one() {
            Ok(m)
        } else {
            Err(Error::NotUnimodular(det))
        }
    }

    pub fn identity() -> Self {
        UnimodularMap {
            alpha: BigInt::one(),
            beta: BigInt::zero(),
            gamma: BigInt::zero(),
            delta: BigInt::one(),
        }
    }

    fn det_value(&self) -> BigInt {
        &self.alpha * &self.delta - &self.beta * &self.gamma
    }

    /// +1 or -1.
    pub fn det(&self) -> i32 {
        if self.det_value().is_positive() {
            1
        } else {
            -1
        }
    }

    pub fn entries(&self) -> [&BigInt; 4] {
        [&self.alpha, &self.beta, &self.gamma, &self.delta]
    }

    /// Image of the point `(x, y)` under the substitution.
    pub fn apply(&self, x: &BigInt, y: &BigInt) -> (BigInt, BigInt) {
        (
            &self.alpha * x + &self.beta * y,
            &self.gamma * x + &self.delta * y,
        )
    }
}

fn cubic_eval(a: &BigInt, b: &BigInt, c: &BigInt, d: &BigInt, x: &BigInt, y: &BigInt) -> BigInt {
    let x2 = x * x;
    let y2 = y * y;
    a * &x2 * x + BigInt::from(3) * b * &x2 * y + BigInt::from(3) * c * x * &y2 + d * &y2 * y
}

/// Coefficients of `F(alpha x + beta y, gamma x + delta y)` in the stored shape.
fn cubic_act(
    [a, b, c, d]: [&BigInt; 4],
    m: &UnimodularMap,
) -> [BigInt; 4] {
    let [al, be, ga, de] = m.entries();
    // Half of the partial derivatives divided by 3: F_x / 3 and F_y / 3.
    let fx = |u: &BigInt, v: &BigInt| a * u * u + BigInt::from(2) * b * u * v + c * v * v;
    let fy = |u: &BigInt, v: &BigInt| b * u * u + BigInt::from(2) * c * u * v + d * v * v;
    let new_a = cubic_eval(a, b, c, d, al, ga);
    let new_d = cubic_eval(a, b, c, d, be, de);
    let new_b = be * fx(al, ga) + de * fy(al, ga);
    let new_c = al * fx(be, de) + ga * fy(be, de);
    [new_a, new_b, new_c, new_d]
}

impl BinaryCubicForm {
    pub fn new(
        a: impl Into<BigInt>,
        b: impl Into<BigInt>,
        c: impl Into<BigInt>,
        d: impl Into<BigInt>,
    ) -> Self {
        BinaryCubicForm { a: a.into(), b: b.into(), c: c.into(), d: d.into() }
    }

    pub fn coefficients(&self) -> [&BigInt; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn evaluate(&self, x: &BigInt, y: &BigInt) -> BigInt {
        cubic_eval(&self.a, &self.b, &self.c, &self.d, x, y)
    }

    /// `D1 = D / 27 = -(a^2 d^2 - 6abcd - 3 b^2 c^2 + 4 a c^3 + 4 b^3 d)`.
    pub fn reduced_discriminant(&self) -> BigInt {
        let (a, b, c, d) = (&self.a, &self.b, &self.c, &self.d);
        let q = a * a * d * d - BigInt::from(6) * a * b * c * d - BigInt::from(3) * b * b * c * c
            + BigInt::from(4) * a * c * c * c
            + BigInt::from(4) * b * b * b * d;
        -q
    }

    pub fn discriminant(&self) -> BigInt {
        self.reduced_discriminant() * 27
    }

    /// `k = -D / 108` when the discriminant is divisible by 108.
    pub fn mordell_k(&self) -> Option<BigInt> {
        let disc = self.discriminant();
        let (q, r) = disc.div_rem(&BigInt::from(108));
        r.is_zero().then(|| -q)
    }

    pub fn hessian(&self) -> HessianForm {
        let (a, b, c, d) = (&self.a, &self.b, &self.c, &self.d);
        HessianForm {
            p: b * b - a * c,
            q: b * c - a * d,
            r: c * c - b * d,
        }
    }

    pub fn covariant_g(&self) -> CubicCovariant {
        let (a, b, c, d) = (&self.a, &self.b, &self.c, &self.d);
        let two = BigInt::from(2);
        let three = BigInt::from(3);
        CubicCovariant {
            a1: -(a * a * d) + &three * a * b * c - &two * b * b * b,
            b1: -(b * b * c) - a * b * d + &two * a * c * c,
            c1: b * c * c - &two * b * b * d + a * c * d,
            d1: -(&three * b * c * d) + &two * c * c * c + a * d * d,
        }
    }

    /// `F o m`, i.e. `(x, y) -> F(alpha x + beta y, gamma x + delta y)`.
    pub fn act(&self, m: &UnimodularMap) -> BinaryCubicForm {
        let [a, b, c, d] = cubic_act(self.coefficients(), m);
        BinaryCubicForm { a, b, c, d }
    }

    /// Checks `4 H1(x,y)^3 = G1(x,y)^2 + D1 F(x,y)^2` exactly.
    pub fn syzygy_holds(&self, x: &BigInt, y: &BigInt) -> bool {
        let h = self.hessian().evaluate(x, y);
        let g = self.covariant_g().evaluate(x, y);
        let f = self.evaluate(x, y);
        BigInt::from(4) * &h * &h * &h == &g * &g + self.reduced_discriminant() * &f * &f
    }

    /// Whether the form has no linear factor over the rationals.
    ///
    /// A linear factor `q x - p y` exists iff `F(p, q) = 0` with `q | a`; for
    /// each positive divisor `q` of `a` the integer roots `p` of the cubic
    /// `F(p, q)` are extracted exactly. When `|d| < |a|` the roles of `x` and
    /// `y` are swapped to keep the divisor search short.
    pub fn is_irreducible(&self) -> Result<bool> {
        if self.reduced_discriminant().is_zero() {
            return Err(Error::DegenerateForm);
        }
        if self.a.is_zero() || self.d.is_zero() {
            return Ok(false);
        }
        let (lead, b, c, tail) = if self.d.abs() < self.a.abs() {
            (&self.d, &self.c, &self.b, &self.a)
        } else {
            (&self.a, &self.b, &self.c, &self.d)
        };
        let three = BigInt::from(3);
        for q in arith::positive_divisors(lead) {
            let roots = arith::cubic_integer_roots_big(
                lead,
                &(&three * b * &q),
                &(&three * c * &q * &q),
                &(tail * &q * &q * &q),
            );
            if !roots.is_empty() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Whether `ad = bc (mod 2)`, equivalently `D1 = 0 (mod 4)`.
    pub fn parity_ok(&self) -> bool {
        (&self.a * &self.d - &self.b * &self.c).is_even()
    }
}

impl fmt::Display for BinaryCubicForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}, {})", self.a, self.b, self.c, self.d)
    }
}

impl HessianForm {
    pub fn evaluate(&self, x: &BigInt, y: &BigInt) -> BigInt {
        &self.p * x * x + &self.q * x * y + &self.r * y * y
    }

    pub fn act(&self, m: &UnimodularMap) -> HessianForm {
        let [al, be, ga, de] = m.entries();
        HessianForm {
            p: self.evaluate(al, ga),
            q: BigInt::from(2) * &self.p * al * be
                + &self.q * (al * de + be * ga)
                + BigInt::from(2) * &self.r * ga * de,
            r: self.evaluate(be, de),
        }
    }

    /// `q^2 - 4pr`; for a Hessian this equals `-D1` of the source form.
    pub fn discriminant(&self) -> BigInt {
        &self.q * &self.q - BigInt::from(4) * &self.p * &self.r
    }
}

impl CubicCovariant {
    pub fn evaluate(&self, x: &BigInt, y: &BigInt) -> BigInt {
        cubic_eval(&self.a1, &self.b1, &self.c1, &self.d1, x, y)
    }

    pub fn act(&self, m: &UnimodularMap) -> CubicCovariant {
        let [a1, b1, c1, d1] = cubic_act([&self.a1, &self.b1, &self.c1, &self.d1], m);
        CubicCovariant { a1, b1, c1, d1 }
    }

    pub fn negate(&self) -> CubicCovariant {
        CubicCovariant {
            a1: -&self.a1,
            b1: -&self.b1,
            c1: -&self.c1,
            d1: -&self.d1,
        }
    }
}
