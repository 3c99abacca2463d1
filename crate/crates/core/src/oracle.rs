//! Brute-force Mordell solver: scan `X` and test `X^3 + k` for squareness.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::pipeline::SolutionSet;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleConfig {
    pub x_max: BigInt,
}

impl OracleConfig {
    pub fn new(x_max: impl Into<BigInt>) -> Result<Self> {
        let x_max = x_max.into();
        if x_max < BigInt::from(1) {
            return Err(Error::Inconsistent(format!("oracle x_max must be at least 1, got {x_max}")));
        }
        Ok(OracleConfig { x_max })
    }

    /// `(50 |k|)^2`, the ceiling used for cross-checks.
    pub fn hall_default(k: &BigInt) -> Self {
        let t = k.abs() * 50;
        OracleConfig { x_max: &t * &t }
    }
}

/// Newton's method on `u128` from a float seed.
fn isqrt_u128(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut r = (n as f64).sqrt() as u128;
    // The seed is within a relative 2^-50 or so; a few Newton steps settle it.
    loop {
        let next = (r + n / r) / 2;
        if next >= r && next <= r + 1 {
            break;
        }
        r = next;
        if r == 0 {
            r = 1;
        }
    }
    while r.checked_mul(r).map_or(true, |sq| sq > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|sq| sq <= n) {
        r += 1;
    }
    r
}

/// `(floor(sqrt(n)), whether n is a perfect square)`.
pub fn integer_sqrt(n: &BigInt) -> Result<(BigInt, bool)> {
    if n.is_negative() {
        return Err(Error::NegativeSqrt(n.clone()));
    }
    if let Some(v) = n.to_u128() {
        let r = isqrt_u128(v);
        return Ok((BigInt::from(r), r * r == v));
    }
    // Float seed from the leading bits, then Newton from above.
    let bits = n.bits();
    let shift = bits.saturating_sub(100) & !1;
    let top = (n >> shift).to_f64().unwrap_or(f64::MAX);
    let mut r: BigInt = BigInt::from(top.sqrt() as u128 + 2) << (shift / 2);
    loop {
        let next: BigInt = (&r + n / &r) >> 1;
        if next >= r {
            break;
        }
        r = next;
    }
    while &r * &r > *n {
        r -= 1;
    }
    let exact = &r * &r == *n;
    Ok((r, exact))
}

/// Smallest `X` with `X^3 + k >= 0`.
fn x_lower(k: &BigInt) -> BigInt {
    let target = -k;
    let mut x = BigInt::from(target.to_f64().unwrap_or(0.0).cbrt().floor() as i128);
    while &x * &x * &x < target {
        x += 1;
    }
    while {
        let y = &x - 1;
        &y * &y * &y >= target
    } {
        x -= 1;
    }
    x
}

/// Quadratic residue tables for cheap rejection of non-squares.
struct SquareFilter {
    /// `63 * 65 * 11`; the residue mod 64 is tested separately from the low bits.
    modulus: u64,
    cube: Vec<u32>,
    square: Vec<bool>,
    square64: [bool; 64],
}

impl SquareFilter {
    fn new() -> Self {
        let modulus = 63 * 65 * 11;
        let mut square = vec![false; modulus as usize];
        for r in 0..modulus {
            square[(r * r % modulus) as usize] = true;
        }
        let cube = (0..modulus).map(|r| (r * r % modulus * r % modulus) as u32).collect();
        let mut square64 = [false; 64];
        for r in 0..64u64 {
            square64[(r * r % 64) as usize] = true;
        }
        SquareFilter { modulus, cube, square, square64 }
    }
}

/// Scan with `i128` arithmetic; valid while `x_max^3 + |k|` stays below `2^126`.
fn scan_small(k: i128, lo: i128, hi: i128) -> Vec<(BigInt, BigInt)> {
    let filter = SquareFilter::new();
    let m = filter.modulus as i128;
    let k_mod = k.rem_euclid(m) as u64;
    let mut x_mod = lo.rem_euclid(m) as usize;
    let mut out = Vec::new();
    for x in lo..=hi {
        let n = x * x * x + k;
        let pass = filter.square64[(n & 63) as usize] && {
            let mut r = filter.cube[x_mod] as u64 + k_mod;
            if r >= filter.modulus {
                r -= filter.modulus;
            }
            filter.square[r as usize]
        };
        x_mod += 1;
        if x_mod == filter.modulus as usize {
            x_mod = 0;
        }
        if !pass {
            continue;
        }
        let n = n as u128;
        let r = isqrt_u128(n);
        if r * r == n {
            push_pair(&mut out, BigInt::from(x), BigInt::from(r));
        }
    }
    out
}

fn push_pair(out: &mut Vec<(BigInt, BigInt)>, x: BigInt, r: BigInt) {
    if r.is_zero() {
        out.push((x, r));
    } else {
        out.push((x.clone(), -r.clone()));
        out.push((x, r));
    }
}

/// Every point on `Y^2 = X^3 + k` with `X <= x_max`.
pub fn brute_force_k(k: &BigInt, cfg: &OracleConfig) -> Result<SolutionSet> {
    if k.is_zero() {
        return Err(Error::ZeroK);
    }
    let lo = x_lower(k);
    let small_limit = BigInt::from(5_000_000_000_000i64);
    let points = if cfg.x_max <= small_limit && k.abs() < BigInt::from(1i128 << 100) {
        let (k, lo, hi) = (k.to_i128().unwrap(), lo.to_i128().unwrap(), cfg.x_max.to_i128().unwrap());
        scan_small(k, lo, hi)
    } else {
        let mut out = Vec::new();
        let mut x = lo;
        while x <= cfg.x_max {
            let n = &x * &x * &x + k;
            let (r, exact) = integer_sqrt(&n)?;
            if exact {
                push_pair(&mut out, x.clone(), r);
            }
            x += 1;
        }
        out
    };
    Ok(SolutionSet::new(k.clone(), points, true))
}

/// Whether `(x, y)` lies on `Y^2 = X^3 + k`.
pub fn verify_point(k: &BigInt, x: &BigInt, y: &BigInt) -> bool {
    y * y == x * x * x + k
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
    fn sqrt_examples() {
        assert_eq!(integer_sqrt(&b(25)).unwrap(), (b(5), true));
        assert_eq!(integer_sqrt(&b(26)).unwrap(), (b(5), false));
        assert_eq!(integer_sqrt(&b(143_384_152_921)).unwrap(), (b(378_661), true));
        assert!(matches!(integer_sqrt(&b(-1)), Err(Error::NegativeSqrt(_))));
        let y: BigInt = "67291628068556097113".parse().unwrap();
        assert_eq!(integer_sqrt(&(&y * &y)).unwrap(), (y.clone(), true));
        assert_eq!(integer_sqrt(&(&y * &y - 1)).unwrap(), (&y - 1, false));
        let huge: BigInt = BigInt::from(3) << 700;
        let (r, _) = integer_sqrt(&huge).unwrap();
        assert!(&r * &r <= huge && (&r + 1) * (&r + 1) > huge);
    }

    #[test]
    fn sqrt_matches_on_u128_edges() {
        for v in [0u128, 1, 2, 3, 4, 15, 16, 17, u64::MAX as u128, u128::MAX, u128::MAX - 1, (1u128 << 126) - 1] {
            let r = isqrt_u128(v);
            assert!(r.checked_mul(r).is_some_and(|s| s <= v));
            assert!((r + 1).checked_mul(r + 1).map_or(true, |s| s > v), "{v}");
        }
    }

    #[test]
    fn lower_endpoint() {
        assert_eq!(x_lower(&b(1)), b(-1));
        assert_eq!(x_lower(&b(8)), b(-2));
        assert_eq!(x_lower(&b(9)), b(-2));
        assert_eq!(x_lower(&b(-2)), b(2));
        assert_eq!(x_lower(&b(-8)), b(2));
    }

    #[test]
    fn examples() {
        let cfg = OracleConfig::new(100).unwrap();
        assert_eq!(coords(&brute_force_k(&b(1), &cfg).unwrap()), vec![(-1, 0), (0, -1), (0, 1), (2, -3), (2, 3)]);
        assert_eq!(coords(&brute_force_k(&b(-2), &cfg).unwrap()), vec![(3, -5), (3, 5)]);
        let k: BigInt = b(-4_090_263);
        let x: BigInt = "16544006443618".parse().unwrap();
        let y: BigInt = "67291628068556097113".parse().unwrap();
        assert!(verify_point(&k, &x, &y));
        assert!(!verify_point(&k, &x, &(&y + 1)));
    }

    #[test]
    fn fast_and_slow_paths_agree() {
        for k in [-30i64, -2, 1, 17, 24, 100] {
            let fast = brute_force_k(&b(k), &OracleConfig::new(20_000).unwrap()).unwrap();
            let lo = x_lower(&b(k));
            let mut slow = Vec::new();
            let mut x = lo;
            while x <= b(20_000) {
                let (r, exact) = integer_sqrt(&(&x * &x * &x + b(k))).unwrap();
                if exact {
                    push_pair(&mut slow, x.clone(), r);
                }
                x += 1;
            }
            assert_eq!(fast, SolutionSet::new(b(k), slow, true));
        }
    }

    #[test]
    fn raising_x_max_only_adds() {
        let small = brute_force_k(&b(17), &OracleConfig::new(100).unwrap()).unwrap();
        let large = brute_force_k(&b(17), &OracleConfig::new(10_000).unwrap()).unwrap();
        assert!(small.points.iter().all(|p| large.points.contains(p)));
        assert_eq!(large.n_k(), 16);
    }
}
