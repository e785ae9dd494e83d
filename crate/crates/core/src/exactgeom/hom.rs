use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::Point;

/// A point written over a single positive common denominator:
/// `coords[i] = num[i] / den`.
///
/// Betweenness on this form needs only integer products (no gcds), and a
/// checked `i128` path covers the coordinate sizes that show up in practice.
#[derive(Clone, Debug)]
pub struct HomPoint {
    num: Vec<BigInt>,
    den: BigInt,
    small: Option<(Vec<i128>, i128)>,
}

// Keeps every intermediate product of the i128 path below 2^126.
const SMALL_LIMIT: i128 = 1 << 28;

impl HomPoint {
    pub fn new(p: &Point) -> Self {
        let den = p
            .coords()
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let num: Vec<BigInt> = p
            .coords()
            .iter()
            .map(|c| c.numer() * (&den / c.denom()))
            .collect();
        let small = num
            .iter()
            .map(|n| n.to_i128().filter(|v| v.abs() < SMALL_LIMIT))
            .collect::<Option<Vec<i128>>>()
            .and_then(|ns| {
                den.to_i128()
                    .filter(|d| *d < SMALL_LIMIT)
                    .map(|d| (ns, d))
            });
        HomPoint { num, den, small }
    }

    pub fn dim(&self) -> usize {
        self.num.len()
    }

    /// `t` lies on the closed segment `[s, u]`. Dimensions must agree.
    pub fn between(s: &HomPoint, t: &HomPoint, u: &HomPoint) -> bool {
        if let (Some(a), Some(b), Some(c)) = (&s.small, &t.small, &u.small) {
            if let Some(r) = between_i128(a, b, c) {
                return r;
            }
        }
        between_big(s, t, u)
    }
}

fn between_i128(s: &(Vec<i128>, i128), t: &(Vec<i128>, i128), u: &(Vec<i128>, i128)) -> Option<bool> {
    let (sx, sw) = (&s.0, s.1);
    let (tx, tw) = (&t.0, t.1);
    let (ux, uw) = (&u.0, u.1);
    let n = sx.len();
    // a = (t − s)·tw·sw, b = (u − s)·uw·sw; both scalings are positive
    let mut a = [0i128; 8];
    let mut b = [0i128; 8];
    if n > 8 {
        return None;
    }
    for i in 0..n {
        a[i] = tx[i] * sw - sx[i] * tw;
        b[i] = ux[i] * sw - sx[i] * uw;
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if a[i].checked_mul(b[j])? != a[j].checked_mul(b[i])? {
                return Some(false);
            }
        }
    }
    let mut ab: i128 = 0;
    let mut bb: i128 = 0;
    for i in 0..n {
        ab = ab.checked_add(a[i].checked_mul(b[i])?)?;
        bb = bb.checked_add(b[i].checked_mul(b[i])?)?;
    }
    if bb == 0 {
        return Some(a[..n].iter().all(|&x| x == 0));
    }
    if ab < 0 {
        return Some(false);
    }
    // (t−s)·(u−s) ≤ |u−s|²  ⇔  ab·uw ≤ bb·tw
    Some(ab.checked_mul(uw)? <= bb.checked_mul(tw)?)
}

fn between_big(s: &HomPoint, t: &HomPoint, u: &HomPoint) -> bool {
    let n = s.num.len();
    let a: Vec<BigInt> = (0..n).map(|i| &t.num[i] * &s.den - &s.num[i] * &t.den).collect();
    let b: Vec<BigInt> = (0..n).map(|i| &u.num[i] * &s.den - &s.num[i] * &u.den).collect();
    for i in 0..n {
        for j in (i + 1)..n {
            if &a[i] * &b[j] != &a[j] * &b[i] {
                return false;
            }
        }
    }
    let ab: BigInt = a.iter().zip(&b).map(|(x, y)| x * y).sum();
    if ab.is_negative() {
        return false;
    }
    let bb: BigInt = b.iter().map(|y| y * y).sum();
    if bb.is_zero() {
        // s = u, so only t = s qualifies, and then ab = 0
        return a.iter().all(Zero::is_zero);
    }
    ab * &u.den <= bb * &t.den
}
