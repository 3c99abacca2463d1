//! Reduced irreducible cubic forms and their enumeration by discriminant window.
//!
//! Positive discriminants use Hermite-style reduction through the (definite)
//! Hessian; negative discriminants use a pair of linear inequalities on the
//! coefficients. Either way each `GL2(Z)` class of irreducible
//! forms has exactly one reduced member, so enumerating reduced forms lists
//! every class once.
//!
//! Real-valued loop bounds are computed in floating point and pushed outward
//! by one unit; every candidate is then re-checked exactly, so rounding can
//! only enlarge the search, never drop a form.

use std::fmt;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::{Signed, ToPrimitive};

use crate::arith::{ceil_out, floor_out};
use crate::error::{Error, Result};
use crate::forms::BinaryCubicForm;

/// The discriminant-magnitude window `(k_lo, k_hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SearchWindow {
    k_lo: u64,
    k_hi: u64,
}

impl SearchWindow {
    pub fn new(k_lo: u64, k_hi: u64) -> Result<Self> {
        if k_lo >= k_hi {
            return Err(Error::InvalidWindow { lo: k_lo, hi: k_hi });
        }
        Ok(SearchWindow { k_lo, k_hi })
    }

    /// `(0, k_hi]`.
    pub fn up_to(k_hi: u64) -> Result<Self> {
        SearchWindow::new(0, k_hi)
    }

    pub fn lo(&self) -> u64 {
        self.k_lo
    }

    pub fn hi(&self) -> u64 {
        self.k_hi
    }

    pub fn contains(&self, magnitude: u64) -> bool {
        self.k_lo < magnitude && magnitude <= self.k_hi
    }

    /// Splits the window into consecutive pieces of at most `chunk` each.
    pub fn split(&self, chunk: u64) -> Vec<SearchWindow> {
        let chunk = chunk.max(1);
        let mut out = Vec::new();
        let mut lo = self.k_lo;
        while lo < self.k_hi {
            let hi = lo.saturating_add(chunk).min(self.k_hi);
            out.push(SearchWindow { k_lo: lo, k_hi: hi });
            lo = hi;
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FormKind {
    IrreduciblePositive,
    IrreducibleNegative,
    Reducible,
}

impl FormKind {
    pub fn tag(&self) -> &'static str {
        match self {
            FormKind::IrreduciblePositive => "P",
            FormKind::IrreducibleNegative => "N",
            FormKind::Reducible => "R",
        }
    }
}

/// A reduced representative together with its discriminant and kind.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FormClass {
    pub form: BinaryCubicForm,
    pub disc: BigInt,
    pub kind: FormKind,
}

impl FormClass {
    /// The text dump line `a b c d D`, with a trailing `R` for reducible forms.
    pub fn dump_line(&self) -> String {
        let f = &self.form;
        let base = format!("{} {} {} {} {}", f.a, f.b, f.c, f.d, self.disc);
        match self.kind {
            FormKind::Reducible => format!("{base} R"),
            _ => base,
        }
    }
}

impl fmt::Display for FormClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.dump_line())
    }
}

/// Core of the positive-discriminant predicate, generic over the integer type.
fn reduced_pos_raw<T: Integer + Signed + Clone>(a: &T, b: &T, c: &T, d: &T) -> bool {
    let p = b.clone() * b.clone() - a.clone() * c.clone();
    let q = b.clone() * c.clone() - a.clone() * d.clone();
    let r = c.clone() * c.clone() - b.clone() * d.clone();
    if !(q.abs() <= p && p <= r) {
        return false;
    }
    if !(a.is_positive() && !b.is_negative()) {
        return false;
    }
    if b.is_zero() && !d.is_negative() {
        return false;
    }
    if q.is_zero() && !d.is_negative() {
        return false;
    }
    if p == q && !(*b < (a.clone() - b.clone()).abs()) {
        return false;
    }
    if p == r {
        let ad = d.abs();
        if !(*a <= ad) {
            return false;
        }
        if *a == ad && !(*b < c.abs()) {
            return false;
        }
    }
    true
}

/// Core of the negative-discriminant predicate, generic over the integer type.
fn reduced_neg_raw<T: Integer + Signed + Clone + From<i32>>(a: &T, b: &T, c: &T, d: &T) -> bool {
    let three = T::from(3);
    let nine = T::from(9);
    let lhs = d.clone() * d.clone() - a.clone() * a.clone();
    if !(lhs > three.clone() * (b.clone() * d.clone() - a.clone() * c.clone())) {
        return false;
    }
    let amb = a.clone() - three.clone() * b.clone();
    let apb = a.clone() + three.clone() * b.clone();
    let ac3 = three * a.clone() * c.clone();
    let mid = a.clone() * d.clone() - nine * b.clone() * c.clone();
    if !(-(amb.clone() * amb) - ac3.clone() < mid && mid < apb.clone() * apb + ac3) {
        return false;
    }
    if !(a.is_positive() && !b.is_negative()) {
        return false;
    }
    if b.is_zero() && !d.is_positive() {
        return false;
    }
    true
}

fn small_coefficients(form: &BinaryCubicForm) -> Option<[i128; 4]> {
    // |coeff| < 2^40 keeps every product in the predicates below 2^127.
    const LIMIT: i128 = 1 << 40;
    let v = [
        form.a.to_i128()?,
        form.b.to_i128()?,
        form.c.to_i128()?,
        form.d.to_i128()?,
    ];
    v.iter().all(|x| x.abs() < LIMIT).then_some(v)
}

/// Whether `form` is reduced in the positive-discriminant sense.
///
/// With Hessian `(P, Q, R) = (b^2 - ac, bc - ad, c^2 - bd)`: `|Q| <= P <= R`;
/// `a > 0`, `b >= 0` and `d < 0` when `b = 0`; `d < 0` when `Q = 0`;
/// `b < |a - b|` when `P = Q`; and when `P = R`, `a <= |d|` with `b < |c|`
/// required in the case `a = |d|`. The form is assumed irreducible.
pub fn is_reduced_pos(form: &BinaryCubicForm) -> Result<bool> {
    let disc = form.discriminant();
    if !disc.is_positive() {
        return Err(Error::WrongDiscriminantSign(disc));
    }
    Ok(match small_coefficients(form) {
        Some([a, b, c, d]) => reduced_pos_raw(&a, &b, &c, &d),
        None => reduced_pos_raw(&form.a, &form.b, &form.c, &form.d),
    })
}

/// Whether `form` is reduced in the negative-discriminant sense:
/// `d^2 - a^2 > 3(bd - ac)`, `-(a - 3b)^2 - 3ac < ad - 9bc < (a + 3b)^2 + 3ac`,
/// `a > 0`, `b >= 0` and `d > 0` when `b = 0`. The form is assumed irreducible.
pub fn is_reduced_neg(form: &BinaryCubicForm) -> Result<bool> {
    let disc = form.discriminant();
    if !disc.is_negative() {
        return Err(Error::WrongDiscriminantSign(disc));
    }
    Ok(match small_coefficients(form) {
        Some([a, b, c, d]) => reduced_neg_raw(&a, &b, &c, &d),
        None => reduced_neg_raw(&form.a, &form.b, &form.c, &form.d),
    })
}

/// The unique positive root of `-4P^3 + (3a + 6b)^2 P^2 + 27 a^2 K = 0`.
///
/// Found by bisection; the returned value is within `1e-9` relative accuracy
/// (far inside the `1e-6` absolute accuracy the `c` bound needs).
pub fn p2_root(a: u64, b: u64, k: u64) -> f64 {
    let s = 3.0 * a as f64 + 6.0 * b as f64;
    let s2 = s * s;
    let konst = 27.0 * (a as f64) * (a as f64) * k as f64;
    let f = |p: f64| -4.0 * p * p * p + s2 * p * p + konst;
    let mut lo = 0.0f64;
    let mut hi = s2.max(konst.cbrt()) + 1.0;
    while f(hi) > 0.0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * hi.max(1.0) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// `D(d) = -27 a^2 d^2 + 27 beta d + 27 gamma` for fixed `(a, b, c)`.
struct DiscInD {
    a2: i128,
    beta: i128,
    gamma: i128,
}

/// Integer brackets for `{d : D(d) > t}`: `outer` contains it, `inner` is contained in it.
struct Brackets {
    outer: Option<(i128, i128)>,
    inner: Option<(i128, i128)>,
}

impl DiscInD {
    fn new(a: i64, b: i64, c: i64) -> Self {
        let (a, b, c) = (a as i128, b as i128, c as i128);
        DiscInD {
            a2: a * a,
            beta: 6 * a * b * c - 4 * b * b * b,
            gamma: 3 * b * b * c * c - 4 * a * c * c * c,
        }
    }

    fn eval(&self, d: i128) -> i128 {
        27 * (-self.a2 * d * d + self.beta * d + self.gamma)
    }

    fn above(&self, t: i128) -> Brackets {
        // D(d) > t  <=>  27 a^2 d^2 - 27 beta d - 27 gamma + t < 0, with roots
        // (27 beta +- sqrt(27 delta)) / (54 a^2).
        let delta = 27 * self.beta * self.beta + 108 * self.a2 * self.gamma - 4 * self.a2 * t;
        if delta <= 0 {
            return Brackets { outer: None, inner: None };
        }
        let s = (27 * delta).sqrt();
        let den = 54 * self.a2;
        let centre = 27 * self.beta;
        let outer = (
            Integer::div_floor(&(centre - s - 1), &den),
            Integer::div_ceil(&(centre + s + 1), &den),
        );
        let inner = (
            Integer::div_floor(&(centre - s), &den) + 1,
            Integer::div_ceil(&(centre + s), &den) - 1,
        );
        Brackets {
            outer: Some(outer),
            inner: (inner.0 <= inner.1).then_some(inner),
        }
    }
}

/// Integers of `[lo, hi]` that avoid `hole`, as at most two ranges.
fn ranges_minus(lo: i128, hi: i128, hole: Option<(i128, i128)>) -> Vec<(i128, i128)> {
    if lo > hi {
        return Vec::new();
    }
    match hole {
        None => vec![(lo, hi)],
        Some((h0, h1)) => {
            let mut out = Vec::with_capacity(2);
            if lo < h0 {
                out.push((lo, hi.min(h0 - 1)));
            }
            if h1 < hi {
                out.push((lo.max(h1 + 1), hi));
            }
            out.retain(|(x, y)| x <= y);
            out
        }
    }
}

fn is_irreducible_small(a: i64, b: i64, c: i64, d: i64) -> bool {
    BinaryCubicForm::new(a, b, c, d)
        .is_irreducible()
        .unwrap_or(false)
}

fn emit(a: i64, b: i64, c: i64, d: i128, disc: i128, kind: FormKind) -> FormClass {
    FormClass {
        form: BinaryCubicForm::new(a, b, c, BigInt::from(d)),
        disc: BigInt::from(disc),
        kind,
    }
}

/// Reduced irreducible forms of positive discriminant in the window, one per
/// `GL2(Z)` class, in loop order `a, b, c, d`.
pub fn enumerate_pos(window: SearchWindow) -> impl Iterator<Item = FormClass> {
    let k = window.k_hi;
    let k0 = window.k_lo;
    let kf = k as f64;
    let a_hi = (2.0 * kf.powf(0.25) / (3.0 * 3f64.sqrt())).floor() as i64 + 1;
    (1..=a_hi).flat_map(move |a| {
        let af = a as f64;
        let inner = kf.sqrt() - 27.0 * af * af / 4.0;
        let b_hi = (af / 2.0 + inner.max(0.0).sqrt() / 3.0).floor() as i64 + 1;
        (0..=b_hi).flat_map(move |b| {
            let bf = b as f64;
            let p2 = p2_root(a as u64, b as u64, k);
            let c_lo = floor_out((9.0 * bf * bf - p2) / (9.0 * af));
            let k0_term = (af * af * k0 as f64 / 4.0).cbrt();
            let c_hi = ceil_out((3.0 * bf * bf - k0_term) / (3.0 * af)).min(b - a);
            (c_lo..=c_hi).flat_map(move |c| pos_candidates(a, b, c, k0, k))
        })
    })
}

fn pos_candidates(a: i64, b: i64, c: i64, k0: u64, k: u64) -> Vec<FormClass> {
    let (ai, bi, ci) = (a as i128, b as i128, c as i128);
    // |bc - ad| <= b^2 - ac bounds d on both sides.
    let red_lo = Integer::div_ceil(&((ai + bi) * ci - bi * bi), &ai);
    let red_hi = Integer::div_floor(&((bi - ai) * ci + bi * bi), &ai);
    if red_lo > red_hi {
        return Vec::new();
    }
    let disc = DiscInD::new(a, b, c);
    let Some((o_lo, o_hi)) = disc.above(k0 as i128).outer else {
        return Vec::new();
    };
    let hole = disc.above(k as i128).inner;
    let mut out = Vec::new();
    for (lo, hi) in ranges_minus(red_lo.max(o_lo), red_hi.min(o_hi), hole) {
        for d in lo..=hi {
            let dv = disc.eval(d);
            if dv <= k0 as i128 || dv > k as i128 {
                continue;
            }
            if !reduced_pos_raw(&ai, &bi, &ci, &d) {
                continue;
            }
            let Ok(d64) = i64::try_from(d) else { continue };
            if is_irreducible_small(a, b, c, d64) {
                out.push(emit(a, b, c, d, dv, FormKind::IrreduciblePositive));
            }
        }
    }
    out
}

/// Reduced irreducible forms with `-D` in the window, one per `GL2(Z)` class,
/// in loop order `a, b, c, d`.
pub fn enumerate_neg(window: SearchWindow) -> impl Iterator<Item = FormClass> {
    let k = window.k_hi;
    let k0 = window.k_lo;
    let kf = k as f64;
    let a_hi = (16.0 * kf / 27.0).powf(0.25).floor() as i64 + 1;
    (1..=a_hi).flat_map(move |a| {
        let af = a as f64;
        let inner = (kf / 3.0).sqrt() - 3.0 * af * af / 4.0;
        let b_hi = (af / 2.0 + inner.max(0.0).sqrt() / 3.0).floor() as i64 + 1;
        (0..=b_hi).flat_map(move |b| {
            let bf = b as f64;
            let c_lo = Integer::div_ceil(&(1 - 3 * b), &3);
            let extra = if a >= 2 * b { 3.0 * bf * bf / af } else { 3.0 * bf - 3.0 * af / 4.0 };
            let c_hi = ceil_out(((kf / (4.0 * af)).cbrt() + extra) / 3.0);
            (c_lo..=c_hi).flat_map(move |c| neg_candidates(a, b, c, k0, k))
        })
    })
}

fn neg_candidates(a: i64, b: i64, c: i64, k0: u64, k: u64) -> Vec<FormClass> {
    let (ai, bi, ci) = (a as i128, b as i128, c as i128);
    // -(a - 3b)^2 - 3ac < ad - 9bc < (a + 3b)^2 + 3ac
    let low_num = 9 * bi * ci - (ai - 3 * bi) * (ai - 3 * bi) - 3 * ai * ci;
    let high_num = (ai + 3 * bi) * (ai + 3 * bi) + 3 * ai * ci + 9 * bi * ci;
    let red_lo = Integer::div_floor(&low_num, &ai) + 1;
    let red_hi = Integer::div_ceil(&high_num, &ai) - 1;
    if red_lo > red_hi {
        return Vec::new();
    }
    let disc = DiscInD::new(a, b, c);
    // -K <= D < -K0  <=>  D > -K - 1 and not D > -K0 - 1
    let Some((o_lo, o_hi)) = disc.above(-(k as i128) - 1).outer else {
        return Vec::new();
    };
    let hole = disc.above(-(k0 as i128) - 1).inner;
    let mut out = Vec::new();
    for (lo, hi) in ranges_minus(red_lo.max(o_lo), red_hi.min(o_hi), hole) {
        for d in lo..=hi {
            let dv = disc.eval(d);
            if dv >= -(k0 as i128) || dv < -(k as i128) {
                continue;
            }
            if !reduced_neg_raw(&ai, &bi, &ci, &d) {
                continue;
            }
            let Ok(d64) = i64::try_from(d) else { continue };
            if is_irreducible_small(a, b, c, d64) {
                out.push(emit(a, b, c, d, dv, FormKind::IrreducibleNegative));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    fn f(a: i64, b: i64, c: i64, d: i64) -> BinaryCubicForm {
        BinaryCubicForm::new(a, b, c, d)
    }

    #[test]
    fn window_validation_and_split() {
        assert!(SearchWindow::new(5, 5).is_err());
        assert!(SearchWindow::new(6, 5).is_err());
        let w = SearchWindow::new(0, 10).unwrap();
        let parts = w.split(4);
        assert_eq!(
            parts.iter().map(|p| (p.lo(), p.hi())).collect::<Vec<_>>(),
            vec![(0, 4), (4, 8), (8, 10)]
        );
        assert!(w.contains(10) && !w.contains(0));
    }

    #[test]
    fn reduced_pos_examples() {
        assert_eq!(f(1, 0, -1, -1).discriminant(), BigInt::from(81));
        assert!(is_reduced_pos(&f(1, 0, -1, -1)).unwrap());
        // (1,1,-1,-3): |Q| = 2 <= P = 2 <= R = 4 holds; P = Q tie needs b < |a - b| = 0.
        let g = f(1, 1, -1, -3);
        assert_eq!(g.discriminant(), BigInt::from(756));
        assert!(!is_reduced_pos(&g).unwrap());
        assert!(!is_reduced_pos(&f(-1, 0, 1, 1)).unwrap());
        assert!(matches!(is_reduced_pos(&f(1, 0, 1, 1)), Err(Error::WrongDiscriminantSign(_))));
    }

    #[test]
    fn reduced_pos_tie_when_a_equals_abs_d() {
        // P = R = 4 in both; a <= |d| decides.
        assert!(is_reduced_pos(&f(1, 2, 0, -2)).unwrap());
        assert!(!is_reduced_pos(&f(2, 0, -2, -1)).unwrap());
    }

    #[test]
    fn reduced_neg_examples() {
        assert_eq!(f(1, 0, 1, 1).discriminant(), BigInt::from(-135));
        assert!(is_reduced_neg(&f(1, 0, 1, 1)).unwrap());
        assert!(!is_reduced_neg(&f(1, 0, -2, 6)).unwrap());
        assert!(!is_reduced_neg(&f(1, -1, 1, 1)).unwrap());
        assert!(matches!(is_reduced_neg(&f(1, 0, -1, -1)), Err(Error::WrongDiscriminantSign(_))));
    }

    #[test]
    fn p2_examples() {
        let p = p2_root(1, 0, 108);
        assert!((p - 9.816).abs() < 1e-3, "{p}");
        for (a, b, k) in [(1u64, 0u64, 108u64), (2, 3, 10_000), (1, 5, 1_000_000)] {
            let p = p2_root(a, b, k);
            let s = 3.0 * a as f64 + 6.0 * b as f64;
            let res = -4.0 * p * p * p + s * s * p * p + 27.0 * (a * a * k) as f64;
            let slope = (-12.0 * p * p + 2.0 * s * s * p).abs();
            assert!(res.abs() <= 1e-6 * slope.max(1.0), "residual {res} at {p}");
        }
        assert!(p2_root(1, 0, 216) > p2_root(1, 0, 108));
    }

    #[test]
    fn a_bounds() {
        let w = SearchWindow::up_to(1944).unwrap();
        assert!(enumerate_pos(w).all(|c| c.form.a <= BigInt::from(2)));
        let a_hi = (2.0 * 1944f64.powf(0.25) / (3.0 * 3f64.sqrt())).floor();
        assert_eq!(a_hi, 2.0);
        let a_hi_neg = (16.0 * 16.0f64 / 27.0).powf(0.25).floor();
        assert_eq!(a_hi_neg, 1.0);
        assert!(enumerate_neg(SearchWindow::up_to(16).unwrap()).all(|c| c.form.a == BigInt::from(1)));
    }

    #[test]
    fn small_window_contents() {
        let pos: Vec<_> = enumerate_pos(SearchWindow::up_to(108).unwrap()).collect();
        assert!(pos.iter().any(|c| c.form == f(1, 0, -1, -1) && c.disc == BigInt::from(81)));
        let exact: Vec<_> = enumerate_pos(SearchWindow::new(80, 81).unwrap()).collect();
        assert_eq!(exact.len(), 1);
        assert_eq!(exact[0].form, f(1, 0, -1, -1));

        let neg: Vec<_> = enumerate_neg(SearchWindow::up_to(135).unwrap()).collect();
        assert!(neg.iter().any(|c| c.form == f(1, 0, 1, 1) && c.disc == BigInt::from(-135)));
    }

    #[test]
    fn emitted_forms_pass_their_checks() {
        let w = SearchWindow::up_to(20_000).unwrap();
        for class in enumerate_pos(w) {
            assert!(is_reduced_pos(&class.form).unwrap());
            assert!(class.form.is_irreducible().unwrap());
            assert_eq!(class.form.discriminant(), class.disc);
            assert!(class.disc > BigInt::zero() && class.disc <= BigInt::from(20_000));
        }
        for class in enumerate_neg(w) {
            assert!(is_reduced_neg(&class.form).unwrap());
            assert!(class.form.is_irreducible().unwrap());
            assert_eq!(class.form.discriminant(), class.disc);
            assert!(class.disc < BigInt::zero() && class.disc >= BigInt::from(-20_000));
        }
    }

    #[test]
    fn dump_format() {
        let class = FormClass { form: f(1, 0, -1, -1), disc: BigInt::from(81), kind: FormKind::IrreduciblePositive };
        assert_eq!(class.dump_line(), "1 0 -1 -1 81");
    }
}
