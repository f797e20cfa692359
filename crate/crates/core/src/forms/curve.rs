//! Traces of Frobenius by point counting.

use crate::arithmetic::is_prime;
use crate::{Error, Result};

pub const DEFAULT_AP_CAP: u64 = 250_000;

/// Weierstrass coefficients [a1, a2, a3, a4, a6].
pub type Weierstrass = [i64; 5];

pub fn discriminant(c: &Weierstrass) -> i128 {
    let [a1, a2, a3, a4, a6] = c.map(|x| x as i128);
    let b2 = a1 * a1 + 4 * a2;
    let b4 = 2 * a4 + a1 * a3;
    let b6 = a3 * a3 + 4 * a6;
    let b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
    -b2 * b2 * b8 - 8 * b4 * b4 * b4 - 27 * b6 * b6 + 9 * b2 * b4 * b6
}

/// a_p = p + 1 − #Ẽ(F_p), counting the point at infinity (and the singular
/// point at bad primes, which yields the usual values in {−1, 0, 1}).
pub fn ec_ap(c: &Weierstrass, p: u64) -> Result<i64> {
    ec_ap_capped(c, p, DEFAULT_AP_CAP)
}

pub fn ec_ap_capped(c: &Weierstrass, p: u64, cap: u64) -> Result<i64> {
    if !is_prime(p) {
        return Err(Error::InvalidInput(format!("{p} is not prime")));
    }
    if p > cap {
        return Err(Error::CapExceeded { requested: p, cap });
    }
    let mut scratch = Vec::new();
    Ok(ap_with_scratch(c, p, &mut scratch))
}

/// Primes below this are always counted directly.
const BSGS_FROM: u64 = 1000;

pub(crate) fn ap_with_scratch(c: &Weierstrass, p: u64, is_sq: &mut Vec<i8>) -> i64 {
    if p >= BSGS_FROM && discriminant(c).rem_euclid(p as i128) != 0 {
        if let Some(a) = ap_by_group_order(c, p) {
            return a;
        }
    }
    ap_by_counting(c, p, is_sq)
}

pub(crate) fn ap_by_counting(c: &Weierstrass, p: u64, is_sq: &mut Vec<i8>) -> i64 {
    let count = if p == 2 { count_naive(c, 2) } else { count_completed_square(c, p, is_sq) };
    p as i64 + 1 - count as i64
}

/// Short model y² = x³ + ax + b over F_p, p ≥ 5.
struct Short {
    p: u64,
    a: u64,
    b: u64,
}

type Pt = Option<(u64, u64)>;

impl Short {
    fn new(c: &Weierstrass, p: u64) -> Self {
        let pi = p as i128;
        let [a1, a2, a3, a4, a6] = c.map(|x| x as i128);
        let b2 = a1 * a1 + 4 * a2;
        let b4 = 2 * a4 + a1 * a3;
        let b6 = a3 * a3 + 4 * a6;
        let c4 = b2 * b2 - 24 * b4;
        let c6 = -b2 * b2 * b2 + 36 * b2 * b4 - 216 * b6;
        Short { p, a: (-27 * c4).rem_euclid(pi) as u64, b: (-54 * c6).rem_euclid(pi) as u64 }
    }

    fn mul(&self, x: u64, y: u64) -> u64 {
        x * y % self.p
    }

    fn inv(&self, x: u64) -> u64 {
        crate::arithmetic::mod_inv(x as i64, self.p).expect("nonzero residue")
    }

    fn add(&self, u: Pt, v: Pt) -> Pt {
        let p = self.p;
        let ((x1, y1), (x2, y2)) = match (u, v) {
            (None, w) | (w, None) => return w,
            (Some(a), Some(b)) => (a, b),
        };
        let lam = if x1 == x2 {
            if (y1 + y2) % p == 0 {
                return None;
            }
            let num = (3 * self.mul(x1, x1) + self.a) % p;
            self.mul(num, self.inv(2 * y1 % p))
        } else {
            self.mul((y2 + p - y1) % p, self.inv((x2 + p - x1) % p))
        };
        let x3 = (self.mul(lam, lam) + 2 * p - x1 - x2) % p;
        let y3 = (self.mul(lam, (x1 + p - x3) % p) + p - y1) % p;
        Some((x3, y3))
    }

    fn neg(&self, u: Pt) -> Pt {
        u.map(|(x, y)| (x, (self.p - y) % self.p))
    }

    fn scale(&self, mut k: u64, u: Pt) -> Pt {
        let mut acc = None;
        let mut base = u;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(acc, base);
            }
            base = self.add(base, base);
            k >>= 1;
        }
        acc
    }

    /// A point with x-coordinate ≥ `start`, skipping 2-torsion.
    fn point_from(&self, start: u64) -> Option<(u64, Pt)> {
        let p = self.p;
        for x in start..p {
            let r = (self.mul(self.mul(x, x), x) + self.mul(self.a, x) + self.b) % p;
            if r == 0 {
                continue;
            }
            if let Some(y) = sqrt_mod(r, p) {
                return Some((x + 1, Some((x, y))));
            }
        }
        None
    }
}

fn sqrt_mod(r: u64, p: u64) -> Option<u64> {
    use crate::arithmetic::mod_pow;
    if r == 0 {
        return Some(0);
    }
    if mod_pow(r, (p - 1) / 2, p) != 1 {
        return None;
    }
    if p % 4 == 3 {
        return Some(mod_pow(r, (p + 1) / 4, p));
    }
    // Tonelli–Shanks
    let (mut q, mut s) = (p - 1, 0u32);
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let z = (2..p).find(|&z| mod_pow(z, (p - 1) / 2, p) == p - 1)?;
    let mut m = s;
    let mut c = mod_pow(z, q, p);
    let mut t = mod_pow(r, q, p);
    let mut x = mod_pow(r, (q + 1) / 2, p);
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = t2 * t2 % p;
            i += 1;
        }
        let b = mod_pow(c, 1 << (m - i - 1), p);
        m = i;
        c = b * b % p;
        t = t * c % p;
        x = x * b % p;
    }
    Some(x)
}

/// a_p from #E(F_p) = p + 1 − a, |a| ≤ 2√p: baby-step giant-step on
/// several points until a single candidate survives. None if still
/// ambiguous (the caller then counts points).
fn ap_by_group_order(c: &Weierstrass, p: u64) -> Option<i64> {
    let e = Short::new(c, p);
    let bound = (2.0 * (p as f64).sqrt()).floor() as i64;
    let (mut next_x, pt) = e.point_from(0)?;
    // all a in [−bound, bound] with aP = (p+1)P
    let m = ((2 * bound + 1) as f64).sqrt().ceil() as i64;
    let mut baby = std::collections::HashMap::with_capacity(m as usize);
    let mut cur: Pt = None;
    for j in 0..m {
        baby.entry(cur).or_insert_with(Vec::new).push(j);
        cur = e.add(cur, pt);
    }
    let step = e.neg(e.scale(m as u64, pt));
    let q = e.scale(p + 1, pt);
    // R_i = Q − (−bound + i·m)P
    let lo = e.scale(bound as u64, pt);
    let mut r = e.add(q, lo);
    let mut cands = Vec::new();
    let mut i = 0;
    while -bound + i * m <= bound {
        if let Some(js) = baby.get(&r) {
            for j in js {
                let a = -bound + i * m + j;
                if a <= bound {
                    cands.push(a);
                }
            }
        }
        r = e.add(r, step);
        i += 1;
    }
    // a point of small order leaves too many candidates; counting is cheaper
    if cands.len() > 16 {
        return None;
    }
    for _ in 0..12 {
        if cands.len() <= 1 {
            break;
        }
        let (nx, pt2) = e.point_from(next_x)?;
        next_x = nx;
        cands.retain(|&a| e.scale((p as i64 + 1 - a) as u64, pt2).is_none());
    }
    (cands.len() == 1).then(|| cands[0])
}

fn count_naive(c: &Weierstrass, p: u64) -> u64 {
    let m = |v: i64| v.rem_euclid(p as i64);
    let [a1, a2, a3, a4, a6] = c.map(m);
    let mut n = 1;
    for x in 0..p as i64 {
        for y in 0..p as i64 {
            let lhs = y * y + a1 * x * y + a3 * y;
            let rhs = x * x * x + a2 * x * x + a4 * x + a6;
            if m(lhs - rhs) == 0 {
                n += 1;
            }
        }
    }
    n
}

// (2y + a1 x + a3)^2 = 4x^3 + b2 x^2 + 2 b4 x + b6
fn count_completed_square(c: &Weierstrass, p: u64, is_sq: &mut Vec<i8>) -> u64 {
    let pi = p as i64;
    let m = |v: i128| v.rem_euclid(p as i128) as i64;
    let [a1, a2, a3, a4, a6] = c.map(|x| x as i128);
    let b2 = m(a1 * a1 + 4 * a2);
    let b4 = m(2 * a4 + a1 * a3);
    let b6 = m(a3 * a3 + 4 * a6);
    // Legendre symbol table: 0, 1 or −1
    is_sq.clear();
    is_sq.resize(p as usize, -1);
    is_sq[0] = 0;
    let mut sq = 0i64;
    for y in 0..=(pi / 2) {
        is_sq[sq as usize] = if sq == 0 { 0 } else { 1 };
        sq += 2 * y + 1;
        sq %= pi;
    }
    // cubic f(x) = 4x^3 + b2 x^2 + 2 b4 x + b6 by forward differences
    let f = |x: i64| m(4 * (x as i128).pow(3) + b2 as i128 * (x as i128).pow(2) + 2 * b4 as i128 * x as i128 + b6 as i128);
    let mut v0 = f(0);
    let mut d1 = m(f(1) as i128 - f(0) as i128);
    let mut d2 = m(f(2) as i128 - 2 * f(1) as i128 + f(0) as i128);
    let d3 = m(24);
    let mut total: i64 = 0;
    for _ in 0..pi {
        total += is_sq[v0 as usize] as i64;
        v0 += d1;
        if v0 >= pi {
            v0 -= pi;
        }
        d1 += d2;
        if d1 >= pi {
            d1 -= pi;
        }
        d2 += d3;
        if d2 >= pi {
            d2 -= pi;
        }
    }
    (1 + pi + total) as u64
}
