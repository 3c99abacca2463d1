//! From form classes of discriminant `-108k` to the integral points of `Y^2 = X^3 + k`.
//!
//! A solution `(x, y)` of `F(x, y) = 1` gives the point
//! `(X, Y) = (H1(x, y), G1(x, y) / 2)`. Distinct pairs of (class, solution)
//! give distinct signed points; the enumerators list one form per `GL2(Z)`
//! class, and the `SL2(Z)` class on the other side of a determinant `-1` map
//! contributes the same points with `Y` negated, so the final set is closed
//! under `Y -> -Y`.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::forms::BinaryCubicForm;
use crate::reducible::{enumerate_reducible, solve_reducible, DiscSign, ReducibleForm};
use crate::reduction::{enumerate_neg, enumerate_pos, FormClass, FormKind, SearchWindow};
use crate::thue::{solve_thue, SolverConfig, ThueSolution};

/// Discriminant span of one range-mode work unit.
pub const DEFAULT_CHUNK: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MordellPoint {
    pub x: BigInt,
    pub y: BigInt,
    pub k: BigInt,
}

impl MordellPoint {
    pub fn on_curve(&self) -> bool {
        &self.y * &self.y == &self.x * &self.x * &self.x + &self.k
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolutionSet {
    pub k: BigInt,
    /// Sorted by `(X, Y)`, no duplicates.
    pub points: Vec<MordellPoint>,
    /// False when some Thue search was bound-limited.
    pub complete: bool,
}

impl SolutionSet {
    /// Builds a set from points on `Y^2 = X^3 + k`, sorting and deduplicating.
    pub fn new(k: BigInt, points: impl IntoIterator<Item = (BigInt, BigInt)>, complete: bool) -> Self {
        let set: BTreeSet<(BigInt, BigInt)> = points.into_iter().collect();
        let points = set.into_iter().map(|(x, y)| MordellPoint { x, y, k: k.clone() }).collect();
        SolutionSet { k, points, complete }
    }

    pub fn n_k(&self) -> usize {
        self.points.len()
    }

    pub fn coordinates(&self) -> Vec<(BigInt, BigInt)> {
        self.points.iter().map(|p| (p.x.clone(), p.y.clone())).collect()
    }
}

fn magnitude(k: &BigInt) -> Result<u64> {
    if k.is_zero() {
        return Err(Error::ZeroK);
    }
    let m = k.abs().to_u64().filter(|m| m.checked_mul(108).is_some());
    m.ok_or_else(|| Error::Inconsistent(format!("|k| = {} is beyond the enumerators' range", k.abs())))
}

fn check_parity(class: &FormClass) -> Result<()> {
    if class.form.parity_ok() {
        Ok(())
    } else {
        Err(Error::Inconsistent(format!("class {} fails ad = bc (mod 2)", class.form)))
    }
}

fn classes_in_window(window: SearchWindow, positive_disc: bool) -> Vec<FormClass> {
    let mut out: Vec<FormClass> = if positive_disc {
        enumerate_pos(window).collect()
    } else {
        enumerate_neg(window).collect()
    };
    let sign = if positive_disc { DiscSign::Positive } else { DiscSign::Negative };
    out.extend(enumerate_reducible(window, sign).map(|f| f.to_class()));
    out
}

/// All reduced irreducible classes and canonical reducible forms with `D = -108k`.
pub fn forms_for_k(k: &BigInt) -> Result<Vec<FormClass>> {
    let m = magnitude(k)?;
    let window = SearchWindow::new(108 * m - 1, 108 * m)?;
    let classes = classes_in_window(window, k.is_negative());
    for class in &classes {
        check_parity(class)?;
    }
    Ok(classes)
}

/// `(H1(x, y), G1(x, y) / 2)` with its sign as given by the covariant.
pub fn native_point(form: &BinaryCubicForm, s: &ThueSolution) -> Result<MordellPoint> {
    let k = form
        .mordell_k()
        .filter(|k| !k.is_zero())
        .ok_or_else(|| Error::Inconsistent(format!("{form} has no Mordell discriminant")))?;
    if form.evaluate(&s.x, &s.y) != BigInt::from(1) {
        return Err(Error::Inconsistent(format!("({}, {}) does not solve {form} = 1", s.x, s.y)));
    }
    let x = form.hessian().evaluate(&s.x, &s.y);
    let g = form.covariant_g().evaluate(&s.x, &s.y);
    if g.is_odd() {
        return Err(Error::Inconsistent(format!("odd G1 at ({}, {}) for {form}", s.x, s.y)));
    }
    let point = MordellPoint { x, y: g / 2, k };
    if !point.on_curve() {
        return Err(Error::Inconsistent(format!("({}, {}) is off its curve", point.x, point.y)));
    }
    Ok(point)
}

/// The point(s) `(X, +-Y)` attached to a solution: two when `Y != 0`, else one.
pub fn triple_to_point(form: &BinaryCubicForm, s: &ThueSolution) -> Result<Vec<MordellPoint>> {
    let p = native_point(form, s)?;
    if p.y.is_zero() {
        return Ok(vec![p]);
    }
    let y = p.y.abs();
    Ok(vec![MordellPoint { y: -y.clone(), ..p.clone() }, MordellPoint { y, ..p }])
}

/// `x^3 - 3X x y^2 + 2Y y^3`, i.e. `(1, 0, -X, 2Y)`.
pub fn converse_form(x: &BigInt, y: &BigInt) -> BinaryCubicForm {
    BinaryCubicForm::new(1, 0, -x, y * 2)
}

/// Solutions of one class and whether they are known complete.
pub fn solve_class(class: &FormClass, cfg: &SolverConfig) -> Result<(Vec<ThueSolution>, bool)> {
    match class.kind {
        FormKind::Reducible => {
            let f = ReducibleForm::new(class.form.b.clone(), class.form.c.clone());
            Ok((solve_reducible(&f)?, true))
        }
        _ => {
            let out = solve_thue(&class.form, cfg)?;
            let proven = !out.bound_limited();
            Ok((out.solutions, proven))
        }
    }
}

/// Maps the solved classes of one `k` to its solution set.
///
/// Each (class, solution) pair yields one signed point; these must be
/// pairwise distinct, which is checked here.
fn assemble(k: &BigInt, solved: &[(FormClass, Vec<ThueSolution>, bool)]) -> Result<SolutionSet> {
    let mut seen: BTreeMap<(BigInt, BigInt), (BinaryCubicForm, ThueSolution)> = BTreeMap::new();
    let mut complete = true;
    for (class, sols, proven) in solved {
        complete &= *proven;
        for s in sols {
            let p = native_point(&class.form, s)?;
            if &p.k != k {
                return Err(Error::Inconsistent(format!("{} belongs to k = {}, not {k}", class.form, p.k)));
            }
            if let Some((f0, s0)) = seen.insert((p.x.clone(), p.y.clone()), (class.form.clone(), s.clone())) {
                return Err(Error::Inconsistent(format!(
                    "k = {k}: ({}, ({}, {})) and ({}, ({}, {})) both give ({}, {})",
                    f0, s0.x, s0.y, class.form, s.x, s.y, p.x, p.y
                )));
            }
        }
    }
    let points = seen.into_keys().flat_map(|(x, y)| [(x.clone(), -y.clone()), (x, y)]);
    Ok(SolutionSet::new(k.clone(), points, complete))
}

fn solve_classes(classes: Vec<FormClass>, cfg: &SolverConfig) -> Result<Vec<(FormClass, Vec<ThueSolution>, bool)>> {
    classes
        .into_par_iter()
        .map(|class| {
            let (sols, proven) = solve_class(&class, cfg)?;
            Ok((class, sols, proven))
        })
        .collect()
}

/// Every integral point on `Y^2 = X^3 + k` reachable within the solver's bounds.
pub fn solve_k(k: &BigInt, cfg: &SolverConfig) -> Result<SolutionSet> {
    cfg.validate()?;
    let classes = forms_for_k(k)?;
    let solved = solve_classes(classes, cfg)?;
    assemble(k, &solved)
}

/// [`solve_range_chunked`] with the default discriminant chunk.
pub fn solve_range(k_lo: i64, k_hi: i64, cfg: &SolverConfig) -> Result<BTreeMap<i64, SolutionSet>> {
    solve_range_chunked(k_lo, k_hi, cfg, DEFAULT_CHUNK)
}

/// Solution sets for every nonzero `k` in `[k_lo, k_hi]`.
///
/// Forms are enumerated once per discriminant chunk rather than per `k`, then
/// bucketed by `k = -D/108`; every `k` in the range gets a record, possibly empty.
pub fn solve_range_chunked(
    k_lo: i64,
    k_hi: i64,
    cfg: &SolverConfig,
    chunk: u64,
) -> Result<BTreeMap<i64, SolutionSet>> {
    cfg.validate()?;
    if k_lo > k_hi || (k_lo == 0 && k_hi == 0) {
        return Err(Error::InvalidRange { lo: k_lo, hi: k_hi });
    }
    let mut windows: Vec<(SearchWindow, bool)> = Vec::new();
    for positive_k in [false, true] {
        let (lo, hi) = if positive_k { (k_lo.max(1), k_hi) } else { (k_lo, k_hi.min(-1)) };
        if lo > hi {
            continue;
        }
        let (m_lo, m_hi) = (lo.unsigned_abs().min(hi.unsigned_abs()), lo.unsigned_abs().max(hi.unsigned_abs()));
        if m_hi.checked_mul(108).is_none() {
            return Err(Error::InvalidRange { lo: k_lo, hi: k_hi });
        }
        let span = SearchWindow::new(108 * (m_lo - 1), 108 * m_hi)?;
        windows.extend(span.split(chunk.max(108)).into_iter().map(|w| (w, !positive_k)));
    }

    let buckets: Vec<(i64, FormClass)> = windows
        .into_par_iter()
        .flat_map_iter(|(w, positive_disc)| {
            classes_in_window(w, positive_disc).into_iter().filter_map(|class| {
                let k = class.form.mordell_k()?.to_i64()?;
                (k_lo <= k && k <= k_hi).then_some((k, class))
            })
        })
        .collect();
    let mut by_k: BTreeMap<i64, Vec<FormClass>> = (k_lo..=k_hi).filter(|&k| k != 0).map(|k| (k, Vec::new())).collect();
    for (k, class) in buckets {
        check_parity(&class)?;
        by_k.entry(k).or_default().push(class);
    }

    let all: Vec<(i64, FormClass)> = by_k.iter().flat_map(|(k, cs)| cs.iter().map(move |c| (*k, c.clone()))).collect();
    let solved: Vec<(i64, (FormClass, Vec<ThueSolution>, bool))> = all
        .into_par_iter()
        .map(|(k, class)| {
            let (sols, proven) = solve_class(&class, cfg)?;
            Ok((k, (class, sols, proven)))
        })
        .collect::<Result<_>>()?;
    let mut grouped: BTreeMap<i64, Vec<(FormClass, Vec<ThueSolution>, bool)>> =
        by_k.keys().map(|&k| (k, Vec::new())).collect();
    for (k, item) in solved {
        grouped.entry(k).or_default().push(item);
    }
    grouped
        .into_par_iter()
        .map(|(k, items)| Ok((k, assemble(&BigInt::from(k), &items)?)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn coords(set: &SolutionSet) -> Vec<(i64, i64)> {
        set.points.iter().map(|p| (p.x.to_i64().unwrap(), p.y.to_i64().unwrap())).collect()
    }

    #[test]
    fn triple_examples() {
        let f = BinaryCubicForm::new(1, 0, -2, 6);
        let pts = triple_to_point(&f, &ThueSolution::new(1, 0)).unwrap();
        assert_eq!(pts.iter().map(|p| (p.x.clone(), p.y.clone())).collect::<Vec<_>>(), vec![(b(2), b(-3)), (b(2), b(3))]);
        let pts = triple_to_point(&f, &ThueSolution::new(1, 1)).unwrap();
        assert_eq!(pts.iter().map(|p| (p.x.clone(), p.y.clone())).collect::<Vec<_>>(), vec![(b(0), b(-1)), (b(0), b(1))]);
        let g = BinaryCubicForm::new(1, 3, 6, 0);
        let pts = triple_to_point(&g, &ThueSolution::new(1, 0)).unwrap();
        assert_eq!(pts.len(), 1);
        assert_eq!((pts[0].x.clone(), pts[0].y.clone(), pts[0].k.clone()), (b(3), b(0), b(-27)));
    }

    #[test]
    fn converse_examples() {
        let f = converse_form(&b(2), &b(3));
        assert_eq!(f, BinaryCubicForm::new(1, 0, -2, 6));
        assert_eq!(f.discriminant(), b(-108));
        assert!(converse_form(&b(0), &b(0)).discriminant().is_zero());
        let g = converse_form(&b(3), &b(5));
        assert_eq!(g, BinaryCubicForm::new(1, 0, -3, 10));
        assert_eq!(g.discriminant(), b(216));
        let pts = triple_to_point(&g, &ThueSolution::new(1, 0)).unwrap();
        assert_eq!(pts.iter().map(|p| (p.x.clone(), p.y.clone(), p.k.clone())).collect::<Vec<_>>(), vec![(b(3), b(-5), b(-2)), (b(3), b(5), b(-2))]);
    }

    #[test]
    fn forms_for_small_k() {
        let k1 = forms_for_k(&b(1)).unwrap();
        assert!(!k1.is_empty() && k1.iter().all(|c| c.disc == b(-108)));
        let k27 = forms_for_k(&b(-27)).unwrap();
        assert!(k27.iter().any(|c| c.kind == FormKind::Reducible && c.form == BinaryCubicForm::new(1, 3, 6, 0)));
        let km1 = forms_for_k(&b(-1)).unwrap();
        let red = km1
            .iter()
            .find(|c| c.kind == FormKind::Reducible && c.form == BinaryCubicForm::new(1, 0, -1, 0))
            .expect("(B, C) = (0, -1)");
        let pts = triple_to_point(&red.form, &ThueSolution::new(1, 0)).unwrap();
        assert_eq!((pts[0].x.clone(), pts[0].y.clone()), (b(1), b(0)));
        assert!(matches!(forms_for_k(&b(0)), Err(Error::ZeroK)));
    }

    #[test]
    fn solve_examples() {
        let cfg = SolverConfig::default();
        assert_eq!(coords(&solve_k(&b(1), &cfg).unwrap()), vec![(-1, 0), (0, -1), (0, 1), (2, -3), (2, 3)]);
        let s = solve_k(&b(-2), &cfg).unwrap();
        assert_eq!(coords(&s), vec![(3, -5), (3, 5)]);
        assert!(s.complete);
        let s = solve_k(&b(17), &cfg).unwrap();
        assert_eq!(s.n_k(), 16);
        let xs: BTreeSet<i64> = coords(&s).into_iter().map(|p| p.0).collect();
        assert_eq!(xs.into_iter().collect::<Vec<_>>(), vec![-2, -1, 2, 4, 8, 43, 52, 5234]);
        assert!(!s.complete);
    }

    #[test]
    fn range_matches_pointwise() {
        let cfg = SolverConfig::default();
        let range = solve_range_chunked(-30, 30, &cfg, 500).unwrap();
        assert_eq!(range.len(), 60);
        for (k, set) in &range {
            assert_eq!(set, &solve_k(&b(*k), &cfg).unwrap(), "k = {k}");
            assert!(set.points.iter().all(MordellPoint::on_curve));
        }
        assert!(solve_range(5, 4, &cfg).is_err());
    }
}
