//! The reducible family `x (x^2 + 3B x y + 3C y^2)`, i.e. forms `(1, B, C, 0)`.

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::{Signed, ToPrimitive, Zero};

use crate::arith::{ceil_out, floor_out};
use crate::error::{Error, Result};
use crate::forms::BinaryCubicForm;
use crate::reduction::{FormClass, FormKind, SearchWindow};
use crate::thue::ThueSolution;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ReducibleForm {
    pub b: BigInt,
    pub c: BigInt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DiscSign {
    Positive,
    Negative,
}

impl ReducibleForm {
    pub fn new(b: impl Into<BigInt>, c: impl Into<BigInt>) -> Self {
        ReducibleForm { b: b.into(), c: c.into() }
    }

    pub fn as_form(&self) -> BinaryCubicForm {
        BinaryCubicForm::new(1, self.b.clone(), self.c.clone(), 0)
    }

    pub fn to_class(&self) -> FormClass {
        FormClass { form: self.as_form(), disc: reducible_discriminant(self), kind: FormKind::Reducible }
    }
}

/// `27 C^2 (3B^2 - 4C)`.
pub fn reducible_discriminant(f: &ReducibleForm) -> BigInt {
    let (b, c) = (&f.b, &f.c);
    BigInt::from(27) * c * c * (BigInt::from(3) * b * b - BigInt::from(4) * c)
}

fn disc_i128(b: i128, c: i128) -> i128 {
    27 * c * c * (3 * b * b - 4 * c)
}

/// Canonical `(B, C)` pairs with discriminant in the signed window, ordered by `C` then `B`.
///
/// Only `B >= 0` is scanned: `(B, C)` and `(-B, C)` differ by `y -> -y`.
pub fn enumerate_reducible(window: SearchWindow, sign: DiscSign) -> impl Iterator<Item = ReducibleForm> {
    let k = window.hi() as f64;
    let (k0i, ki) = (window.lo() as i128, window.hi() as i128);
    let (c_lo, c_hi) = match sign {
        DiscSign::Positive => (floor_out(-(k / 108.0).cbrt()), ceil_out((k / 27.0).sqrt())),
        DiscSign::Negative => (1, ceil_out((k / 27.0).sqrt())),
    };
    (c_lo..=c_hi).filter(|&c| c != 0).flat_map(move |c| {
        let cf = c as f64;
        let c2 = 81.0 * cf * cf;
        let (b_lo, b_hi) = match sign {
            DiscSign::Positive => {
                let lo = ((4.0 * cf + 1.0) / 3.0).max(0.0).sqrt();
                let hi = ((k + 108.0 * cf * cf * cf) / c2).max(0.0).sqrt();
                (floor_out(lo).max(0), ceil_out(hi))
            }
            DiscSign::Negative => {
                let lo = ((-k + 108.0 * cf * cf * cf) / c2).max(0.0).sqrt();
                let hi = ((4.0 * cf - 1.0) / 3.0).max(0.0).sqrt();
                (floor_out(lo).max(0), ceil_out(hi))
            }
        };
        (b_lo..=b_hi).filter_map(move |b| {
            let d = disc_i128(b as i128, c as i128);
            let inside = match sign {
                DiscSign::Positive => k0i < d && d <= ki,
                DiscSign::Negative => k0i < -d && -d <= ki,
            };
            if !inside {
                return None;
            }
            let f = ReducibleForm::new(b, c);
            let canon = canonical_triple(&f).expect("enumerated pairs are well formed");
            (canon == f).then_some(f)
        })
    })
}

/// The three `SL2(Z)`-equivalent pairs when the discriminant is a square, else just `f`.
pub fn equivalent_pairs(f: &ReducibleForm) -> Result<Vec<ReducibleForm>> {
    let disc = reducible_discriminant(f);
    if disc.is_zero() {
        return Err(Error::DegenerateForm);
    }
    if disc.is_negative() || !is_square(&disc) {
        return Ok(vec![f.clone()]);
    }
    let malformed = |reason| Error::MalformedReducible { b: f.b.clone(), c: f.c.clone(), reason };
    let (c0, rem) = f.c.div_rem(&BigInt::from(3));
    if !rem.is_zero() {
        return Err(malformed("square discriminant with C not divisible by 3"));
    }
    let d0_sq = &f.b * &f.b - BigInt::from(4) * &c0;
    if d0_sq.is_negative() || !is_square(&d0_sq) {
        return Err(malformed("B^2 - 4C/3 is not a square"));
    }
    let d0 = d0_sq.sqrt();
    let three = BigInt::from(3);
    let two = BigInt::from(2);
    let half = |n: BigInt| -> Result<BigInt> {
        let (q, r) = n.div_rem(&two);
        if r.is_zero() { Ok(q) } else { Err(malformed("odd numerator in equivalent pair")) }
    };
    let b2 = half(-&f.b + &three * &d0)?;
    let c2 = half(&three * &d0 * (&d0 - &f.b))?;
    let b3 = half(-&f.b - &three * &d0)?;
    let c3 = half(&three * &d0 * (&d0 + &f.b))?;
    Ok(vec![f.clone(), ReducibleForm { b: b2, c: c2 }, ReducibleForm { b: b3, c: c3 }])
}

/// The representative of `f`'s class within the family: `f` itself when the
/// discriminant is not a square, otherwise the member of its triple with `B > 0` and `C > 0`.
pub fn canonical_triple(f: &ReducibleForm) -> Result<ReducibleForm> {
    let pairs = equivalent_pairs(f)?;
    if pairs.len() == 1 {
        return Ok(f.clone());
    }
    let mut positive = pairs.into_iter().filter(|p| p.b.is_positive() && p.c.is_positive());
    match (positive.next(), positive.next()) {
        (Some(p), None) => Ok(p),
        _ => Err(Error::MalformedReducible {
            b: f.b.clone(),
            c: f.c.clone(),
            reason: "triple lacks a unique member with B > 0 and C > 0",
        }),
    }
}

/// All solutions of `x (x^2 + 3Bxy + 3Cy^2) = 1`: `(1, 0)`, plus `(1, -B/C)` when `C | B`.
pub fn solve_reducible(f: &ReducibleForm) -> Result<Vec<ThueSolution>> {
    if reducible_discriminant(f).is_zero() {
        return Err(Error::DegenerateForm);
    }
    let mut out = vec![ThueSolution::new(1, 0)];
    let (q, r) = f.b.div_rem(&f.c);
    if r.is_zero() && !q.is_zero() {
        out.push(ThueSolution { x: BigInt::from(1), y: -q });
    }
    Ok(out)
}

fn is_square(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    if let Some(v) = n.to_u128() {
        let r = v.sqrt();
        return r * r == v;
    }
    let r = n.sqrt();
    &r * &r == *n
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn discriminants() {
        assert_eq!(reducible_discriminant(&ReducibleForm::new(0, -1)), BigInt::from(108));
        assert_eq!(reducible_discriminant(&ReducibleForm::new(3, 6)), BigInt::from(2916));
        assert!(reducible_discriminant(&ReducibleForm::new(2, 3)).is_zero());
        for b in -6..=6 {
            for c in -6..=6 {
                let f = ReducibleForm::new(b, c);
                assert_eq!(reducible_discriminant(&f), f.as_form().discriminant());
            }
        }
    }

    #[test]
    fn triple_examples() {
        let pairs = equivalent_pairs(&ReducibleForm::new(0, -3)).unwrap();
        assert_eq!(
            pairs,
            vec![ReducibleForm::new(0, -3), ReducibleForm::new(3, 6), ReducibleForm::new(-3, 6)]
        );
        for p in &pairs {
            assert_eq!(canonical_triple(p).unwrap(), ReducibleForm::new(3, 6));
        }
        assert_eq!(canonical_triple(&ReducibleForm::new(0, -1)).unwrap(), ReducibleForm::new(0, -1));
        assert!(matches!(canonical_triple(&ReducibleForm::new(2, 3)), Err(Error::DegenerateForm)));
    }

    #[test]
    fn enumeration_examples() {
        let w = SearchWindow::up_to(108).unwrap();
        assert!(enumerate_reducible(w, DiscSign::Positive).any(|f| f == ReducibleForm::new(0, -1)));
        let w = SearchWindow::up_to(2916).unwrap();
        let all: Vec<_> = enumerate_reducible(w, DiscSign::Positive).collect();
        assert!(all.contains(&ReducibleForm::new(3, 6)));
        assert!(!all.contains(&ReducibleForm::new(0, -3)));
        let neg: Vec<_> = enumerate_reducible(SearchWindow::up_to(27).unwrap(), DiscSign::Negative).collect();
        assert_eq!(neg, vec![ReducibleForm::new(1, 1)]);
    }

    #[test]
    fn enumeration_matches_box_scan() {
        for sign in [DiscSign::Positive, DiscSign::Negative] {
            let w = SearchWindow::up_to(20_000).unwrap();
            let mut got: Vec<_> = enumerate_reducible(w, sign).collect();
            got.sort();
            let mut want = Vec::new();
            for c in -60i128..=60 {
                for b in 0i128..=200 {
                    let d = disc_i128(b, c);
                    let ok = match sign {
                        DiscSign::Positive => d > 0 && d <= 20_000,
                        DiscSign::Negative => d < 0 && -d <= 20_000,
                    };
                    let f = ReducibleForm::new(b, c);
                    if ok && canonical_triple(&f).unwrap() == f {
                        want.push(f);
                    }
                }
            }
            want.sort();
            assert_eq!(got, want);
        }
    }

    #[test]
    fn solutions() {
        let one = |f: &ReducibleForm| solve_reducible(f).unwrap();
        assert_eq!(one(&ReducibleForm::new(3, 6)), vec![ThueSolution::new(1, 0)]);
        assert_eq!(one(&ReducibleForm::new(0, -1)), vec![ThueSolution::new(1, 0)]);
        assert_eq!(one(&ReducibleForm::new(2, 1)), vec![ThueSolution::new(1, 0), ThueSolution::new(1, -2)]);
        for b in 0..=8 {
            for c in -8..=8 {
                let f = ReducibleForm::new(b, c);
                if reducible_discriminant(&f).is_zero() {
                    continue;
                }
                for s in one(&f) {
                    assert_eq!(f.as_form().evaluate(&s.x, &s.y), BigInt::from(1));
                }
            }
        }
    }

    #[test]
    fn parity_of_mordell_discriminants() {
        let w = SearchWindow::up_to(50_000).unwrap();
        for sign in [DiscSign::Positive, DiscSign::Negative] {
            for f in enumerate_reducible(w, sign) {
                if (reducible_discriminant(&f) % 108u32).is_zero() {
                    assert!((&f.b * &f.c).is_even(), "{f:?}");
                }
            }
        }
    }
}
