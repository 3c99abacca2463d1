//! Exact integer helpers shared by the form, reduction and Thue code.
//!
//! The workhorse is [`cubic_integer_roots`], which finds every integer root of
//! an integer cubic without floating point: the derivative's discriminant
//! splits the line into monotone pieces, each piece holds at most one root, and
//! that root is located by galloping plus bisection on exact evaluations.

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::{Signed, ToPrimitive, Zero};

/// Integer types the root extractor runs on (`i128` fast path, `BigInt`).
pub(crate) trait Exact: Integer + Signed + Roots + Clone + From<i32> {}
impl<T: Integer + Signed + Roots + Clone + From<i32>> Exact for T {}

struct Cubic<T> {
    c3: T,
    c2: T,
    c1: T,
    c0: T,
}

impl<T: Exact> Cubic<T> {
    fn eval(&self, x: &T) -> T {
        ((self.c3.clone() * x.clone() + self.c2.clone()) * x.clone() + self.c1.clone()) * x.clone()
            + self.c0.clone()
    }

    /// `+p(x)` or `-p(x)`, so that the piece being searched is increasing.
    fn oriented(&self, x: &T, increasing: bool) -> T {
        let v = self.eval(x);
        if increasing { v } else { -v }
    }

    /// The integer root, if any, of `p` on a piece `[lo, hi]` where `p` is strictly
    /// monotone; `None` ends are infinite. The search starts at `start` (clamped
    /// into the piece) and gallops outward, so a good start costs a few evaluations.
    fn piece_root(&self, lo: Option<&T>, hi: Option<&T>, increasing: bool, start: T) -> Option<T> {
        let two = T::from(2);
        let mut m = start;
        if let Some(l) = lo {
            if m < *l {
                m = l.clone();
            }
        }
        if let Some(h) = hi {
            if m > *h {
                m = h.clone();
            }
        }
        let v = self.oriented(&m, increasing);
        if v.is_zero() {
            return Some(m);
        }
        // Bracket (a, b) with s(a) < 0 < s(b), then bisect.
        let (mut a, mut b) = if v.is_negative() {
            let mut step = T::one();
            let mut a = m;
            loop {
                let mut x = a.clone() + step.clone();
                if let Some(h) = hi {
                    if x > *h {
                        x = h.clone();
                    }
                }
                let w = self.oriented(&x, increasing);
                if w.is_zero() {
                    return Some(x);
                }
                if w.is_positive() {
                    break (a, x);
                }
                if hi.is_some_and(|h| x == *h) {
                    return None;
                }
                a = x;
                step = step * two.clone();
            }
        } else {
            let mut step = T::one();
            let mut b = m;
            loop {
                let mut x = b.clone() - step.clone();
                if let Some(l) = lo {
                    if x < *l {
                        x = l.clone();
                    }
                }
                let w = self.oriented(&x, increasing);
                if w.is_zero() {
                    return Some(x);
                }
                if w.is_negative() {
                    break (x, b);
                }
                if lo.is_some_and(|l| x == *l) {
                    return None;
                }
                b = x;
                step = step * two.clone();
            }
        };
        while b.clone() - a.clone() > T::one() {
            let mid = Integer::div_floor(&(a.clone() + b.clone()), &two);
            let w = self.oriented(&mid, increasing);
            if w.is_zero() {
                return Some(mid);
            }
            if w.is_negative() {
                a = mid;
            } else {
                b = mid;
            }
        }
        None
    }
}

fn pick_start<T: Exact>(hints: &[T], lo: Option<&T>, hi: Option<&T>, default: T) -> T {
    hints
        .iter()
        .find(|h| lo.map_or(true, |l| *h >= l) && hi.map_or(true, |u| *h <= u))
        .cloned()
        .unwrap_or(default)
}

/// All integer roots of `c3 x^3 + c2 x^2 + c1 x + c0`, ascending and distinct.
///
/// `c3` must be nonzero. Callers on `i128` must make sure the evaluations stay
/// in range; [`cubic_integer_roots_big`] does that check and falls back to
/// `BigInt`.
pub(crate) fn cubic_integer_roots<T: Exact>(c3: T, c2: T, c1: T, c0: T) -> Vec<T> {
    cubic_integer_roots_hinted(c3, c2, c1, c0, &[])
}

/// As [`cubic_integer_roots`], with approximate root locations used only as
/// starting points for the exact search.
pub(crate) fn cubic_integer_roots_hinted<T: Exact>(c3: T, c2: T, c1: T, c0: T, hints: &[T]) -> Vec<T> {
    assert!(!c3.is_zero(), "leading coefficient must be nonzero");
    let p = if c3.is_negative() {
        Cubic { c3: -c3, c2: -c2, c1: -c1, c0: -c0 }
    } else {
        Cubic { c3, c2, c1, c0 }
    };

    let mut roots = Vec::with_capacity(3);
    let disc = p.c2.clone() * p.c2.clone() - T::from(3) * p.c3.clone() * p.c1.clone();
    if !disc.is_positive() {
        // Strictly increasing everywhere.
        let start = pick_start(hints, None, None, T::zero());
        roots.extend(p.piece_root(None, None, true, start));
        return roots;
    }

    // Critical points r- < r+ of p lie in the brackets below; s <= sqrt(disc) < s + 1.
    let s = disc.sqrt();
    let three = T::from(3) * p.c3.clone();
    let neg_c2 = -p.c2.clone();
    let e1 = Integer::div_floor(&(neg_c2.clone() - s.clone() - T::one()), &three);
    let e1_in = Integer::div_ceil(&(neg_c2.clone() - s.clone()), &three);
    let e2_in = Integer::div_floor(&(neg_c2.clone() + s.clone()), &three);
    let e2 = Integer::div_ceil(&(neg_c2 + s + T::one()), &three);

    let start = pick_start(hints, None, Some(&e1), e1.clone());
    roots.extend(p.piece_root(None, Some(&e1), true, start));
    let mut x = e1 + T::one();
    while x < e1_in {
        if p.eval(&x).is_zero() {
            roots.push(x.clone());
        }
        x = x + T::one();
    }
    if e1_in <= e2_in {
        let start = pick_start(hints, Some(&e1_in), Some(&e2_in), e1_in.clone());
        roots.extend(p.piece_root(Some(&e1_in), Some(&e2_in), false, start));
    }
    let mut x = e2_in + T::one();
    while x < e2 {
        if p.eval(&x).is_zero() {
            roots.push(x.clone());
        }
        x = x + T::one();
    }
    let start = pick_start(hints, Some(&e2), None, e2.clone());
    roots.extend(p.piece_root(Some(&e2), None, true, start));

    roots.sort();
    roots.dedup();
    roots
}

/// Fujiwara-style bound on the magnitude of every complex root.
fn root_radius(c: &[f64; 4]) -> f64 {
    let lead = c[0].abs();
    2.0 * (c[1] / lead)
        .abs()
        .max((c[2] / lead).abs().sqrt())
        .max((c[3] / lead).abs().cbrt())
}

/// Headroom check for running [`cubic_integer_roots`] on `i128`.
///
/// Every probe the extractor makes lies within a small multiple of the root
/// radius (starting hints are clamped to it), so bounding the polynomial's
/// magnitude there bounds every intermediate value.
fn fits_i128(c: &[f64; 4]) -> bool {
    let x = 8.0 * root_radius(c) + 8.0;
    let bound = c[0].abs() * x * x * x + c[1].abs() * x * x + c[2].abs() * x + c[3].abs();
    let disc = c[1] * c[1] + 3.0 * (c[0] * c[2]).abs();
    const LIMIT: f64 = 1.0e36; // ~2^119, well inside i128
    bound.is_finite() && bound < LIMIT && disc < LIMIT
}

/// [`cubic_integer_roots`] on `BigInt` input, taking the `i128` path when safe.
pub(crate) fn cubic_integer_roots_big(
    c3: &BigInt,
    c2: &BigInt,
    c1: &BigInt,
    c0: &BigInt,
) -> Vec<BigInt> {
    let small = (|| {
        let v = [c3.to_i128()?, c2.to_i128()?, c1.to_i128()?, c0.to_i128()?];
        let f = [v[0] as f64, v[1] as f64, v[2] as f64, v[3] as f64];
        fits_i128(&f).then_some(v)
    })();
    match small {
        Some([a, b, c, d]) => cubic_integer_roots(a, b, c, d).into_iter().map(BigInt::from).collect(),
        None => cubic_integer_roots(c3.clone(), c2.clone(), c1.clone(), c0.clone()),
    }
}

/// `i128` entry point used by hot loops; falls back to `BigInt` when headroom is short.
///
/// `hints` are approximate root locations; they only choose where the exact
/// search starts.
pub(crate) fn cubic_integer_roots_i128(c3: i128, c2: i128, c1: i128, c0: i128, hints: &[f64]) -> Vec<BigInt> {
    let f = [c3 as f64, c2 as f64, c1 as f64, c0 as f64];
    let radius = root_radius(&f) + 2.0;
    if fits_i128(&f) {
        let h: Vec<i128> = hints
            .iter()
            .filter(|h| h.is_finite() && h.abs() <= radius)
            .map(|h| h.floor() as i128)
            .collect();
        cubic_integer_roots_hinted(c3, c2, c1, c0, &h).into_iter().map(BigInt::from).collect()
    } else {
        cubic_integer_roots(BigInt::from(c3), BigInt::from(c2), BigInt::from(c1), BigInt::from(c0))
    }
}

/// The exact rational value `num / den` of a finite float in lowest terms, `den` a power of two.
pub(crate) fn f64_to_ratio(x: f64) -> Option<(BigInt, BigInt)> {
    if !x.is_finite() {
        return None;
    }
    if x == 0.0 {
        return Some((BigInt::zero(), BigInt::from(1)));
    }
    let bits = x.to_bits();
    let sign = if bits >> 63 == 1 { -1 } else { 1 };
    let exp = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    let (mant, e) = if exp == 0 { (frac, -1074) } else { (frac | (1u64 << 52), exp - 1075) };
    let num = BigInt::from(mant) * BigInt::from(sign);
    if e >= 0 {
        return Some((num << (e as usize), BigInt::from(1)));
    }
    let den = BigInt::from(1) << ((-e) as usize);
    let g = num.gcd(&den);
    Some((num / &g, den / g))
}

/// Positive divisors of `n` by trial division, ascending.
pub(crate) fn positive_divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    if n.is_zero() {
        return Vec::new();
    }
    if let Some(m) = n.to_u128() {
        let mut small = Vec::new();
        let mut large = Vec::new();
        let mut i: u128 = 1;
        while i * i <= m {
            if m % i == 0 {
                small.push(i);
                if i * i != m {
                    large.push(m / i);
                }
            }
            i += 1;
        }
        small.extend(large.into_iter().rev());
        return small.into_iter().map(BigInt::from).collect();
    }
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut i = BigInt::from(1);
    while &i * &i <= n {
        if (&n % &i).is_zero() {
            if &i * &i != n {
                large.push(&n / &i);
            }
            small.push(i.clone());
        }
        i += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Smallest integer `>= x` for a finite float, pushed out by one more unit.
pub(crate) fn ceil_out(x: f64) -> i64 {
    x.ceil() as i64 + 1
}

/// Largest integer `<= x` for a finite float, pushed out by one more unit.
pub(crate) fn floor_out(x: f64) -> i64 {
    x.floor() as i64 - 1
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(c: [i128; 4], lo: i128, hi: i128) -> Vec<i128> {
        (lo..=hi)
            .filter(|&x| ((c[0] * x + c[1]) * x + c[2]) * x + c[3] == 0)
            .collect()
    }

    #[test]
    fn roots_of_factored_cubics() {
        // (x - 2)(x + 3)(x - 7) = x^3 - 6x^2 - 13x + 42
        assert_eq!(cubic_integer_roots(1i128, -6, -13, 42), vec![-3, 2, 7]);
        // 2(x - 5)^2 (x + 1)
        assert_eq!(cubic_integer_roots(2i128, -18, 30, 50), vec![-1, 5]);
        // x^3 - 2 has none
        assert!(cubic_integer_roots(1i128, 0, 0, -2).is_empty());
        // (x - 1)^3
        assert_eq!(cubic_integer_roots(1i128, -3, 3, -1), vec![1]);
        // negative leading coefficient: -(x - 4)(x^2 + 1)
        assert_eq!(cubic_integer_roots(-1i128, 4, -1, 4), vec![4]);
    }

    #[test]
    fn adjacent_roots_and_close_critical_points() {
        // x(x - 1)(x + 1)
        assert_eq!(cubic_integer_roots(1i128, 0, -1, 0), vec![-1, 0, 1]);
        // 6(x)(x-1)(x-2) style, leading coefficient large relative to spacing
        assert_eq!(cubic_integer_roots(6i128, -18, 12, 0), vec![0, 1, 2]);
    }

    #[test]
    fn bigint_path_handles_huge_roots() {
        let r = BigInt::parse_bytes(b"67291628068556097113", 10).unwrap();
        // (x - r)(x^2 + 1) = x^3 - r x^2 + x - r
        let roots = cubic_integer_roots_big(&BigInt::from(1), &-&r, &BigInt::from(1), &-&r);
        assert_eq!(roots, vec![r]);
    }

    #[test]
    fn matches_brute_force_on_small_cubics() {
        for a in [-3i128, -1, 1, 2, 5] {
            for b in -6..=6 {
                for c in -6..=6 {
                    for d in -12..=12 {
                        let got = cubic_integer_roots(a, b, c, d);
                        // roots of an integer cubic divide d when d != 0; |x| <= 1 + 12 here
                        let want = brute([a, b, c, d], -40, 40);
                        assert_eq!(got, want, "cubic ({a},{b},{c},{d})");
                    }
                }
            }
        }
    }

    #[test]
    fn hints_do_not_change_results() {
        let mut rng = 0x2545f4914f6cdd1du64;
        let mut next = move |m: i128| {
            rng ^= rng << 13;
            rng ^= rng >> 7;
            rng ^= rng << 17;
            (rng % (2 * m as u64 + 1)) as i128 - m
        };
        for _ in 0..3000 {
            let r = [next(50), next(50), next(50)];
            let lead = next(3).max(1);
            let c = [lead, -lead * (r[0] + r[1] + r[2]), lead * (r[0] * r[1] + r[1] * r[2] + r[0] * r[2]), -lead * r[0] * r[1] * r[2] + next(2)];
            let plain = cubic_integer_roots(c[0], c[1], c[2], c[3]);
            let hints = [next(60) as f64 + 0.5, next(60) as f64, 1e300, f64::NAN];
            let hinted: Vec<i128> = cubic_integer_roots_i128(c[0], c[1], c[2], c[3], &hints)
                .into_iter()
                .map(|b| b.to_i128().unwrap())
                .collect();
            assert_eq!(plain, hinted, "{c:?}");
        }
    }

    #[test]
    fn float_ratio_is_exact() {
        assert_eq!(f64_to_ratio(1.41), f64_to_ratio(1.41));
        let (n, d) = f64_to_ratio(0.75).unwrap();
        assert_eq!((n, d), (BigInt::from(3), BigInt::from(4)));
        let (n, d) = f64_to_ratio(-50.0).unwrap();
        assert_eq!(n / d, BigInt::from(-50));
        assert!(f64_to_ratio(f64::INFINITY).is_none());
    }

    #[test]
    fn divisors() {
        let ds: Vec<i64> = positive_divisors(&BigInt::from(-36))
            .iter()
            .map(|d| d.to_i64().unwrap())
            .collect();
        assert_eq!(ds, vec![1, 2, 3, 4, 6, 9, 12, 18, 36]);
        assert!(positive_divisors(&BigInt::from(0)).is_empty());
    }
}
