//! Elementary number theory, Dirichlet characters and Gauss sums.

use crate::{e_frac, Complex64, Error, Result};
use num_integer::Integer;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

pub const DEFAULT_MODULUS_CAP: u64 = 10_000;

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

pub fn mod_pow(mut b: u64, mut e: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut r = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = (r as u128 * b as u128 % m as u128) as u64;
        }
        b = (b as u128 * b as u128 % m as u128) as u64;
        e >>= 1;
    }
    r
}

/// Inverse of a modulo m, if gcd(a, m) = 1.
pub fn mod_inv(a: i64, m: u64) -> Option<u64> {
    let m_i = m as i128;
    let a = (a as i128).rem_euclid(m_i);
    let e = num_integer::Integer::extended_gcd(&a, &m_i);
    if e.gcd != 1 {
        return None;
    }
    Some(e.x.rem_euclid(m_i) as u64)
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let (mut d, mut s) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = mod_pow(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = (x as u128 * x as u128 % n as u128) as u64;
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn primes_up_to(n: usize) -> Vec<u64> {
    let spf = smallest_prime_factors(n);
    (2..=n).filter(|&i| spf[i] == i as u32).map(|i| i as u64).collect()
}

/// spf[n] = smallest prime factor of n (spf[0] = spf[1] = 0).
pub fn smallest_prime_factors(n: usize) -> Vec<u32> {
    let mut spf = vec![0u32; n + 1];
    for i in 2..=n {
        if spf[i] == 0 {
            let mut j = i;
            while j <= n {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    spf
}

pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n).iter().fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

pub fn divisor_count(n: u64) -> u64 {
    factorize(n).iter().map(|&(_, e)| e as u64 + 1).product()
}

/// Smallest primitive root modulo a prime p.
pub fn smallest_primitive_root(p: u64) -> u64 {
    if p == 2 {
        return 1;
    }
    let fs = factorize(p - 1);
    (2..p)
        .find(|&g| fs.iter().all(|&(r, _)| mod_pow(g, (p - 1) / r, p) != 1))
        .expect("prime modulus has a primitive root")
}

/// (Z/qZ)^* as a product of cyclic groups with explicit discrete logs.
#[derive(Debug)]
struct UnitGroup {
    modulus: u64,
    /// generator residues and their orders
    gens: Vec<(u64, u64)>,
    /// dlog[n] = exponent vector of n on `gens`, None for non-units
    dlog: Vec<Option<Vec<u64>>>,
}

fn crt_lift(residue: u64, pe: u64, q: u64) -> u64 {
    // x ≡ residue (mod pe), x ≡ 1 (mod q/pe)
    let rest = q / pe;
    if rest == 1 {
        return residue % pe;
    }
    let inv = mod_inv(rest as i64, pe).unwrap();
    let t = ((residue + pe - 1 % pe) % pe) as u128 * inv as u128 % pe as u128;
    ((1 + rest as u128 * t) % q as u128) as u64
}

impl UnitGroup {
    fn new(q: u64) -> Self {
        let mut gens = Vec::new();
        for (p, e) in factorize(q) {
            let pe = p.pow(e);
            if p == 2 {
                match e {
                    1 => {}
                    2 => gens.push((crt_lift(3, pe, q), 2)),
                    _ => {
                        gens.push((crt_lift(pe - 1, pe, q), 2));
                        gens.push((crt_lift(5, pe, q), pe / 4));
                    }
                }
            } else {
                let mut g = smallest_primitive_root(p);
                if e > 1 && mod_pow(g, p - 1, p * p) == 1 {
                    g += p;
                }
                gens.push((crt_lift(g, pe, q), pe / p * (p - 1)));
            }
        }
        let mut dlog = vec![None; q as usize];
        let total: u64 = gens.iter().map(|g| g.1).product();
        let mut exps = vec![0u64; gens.len()];
        for _ in 0..total {
            let mut x = 1 % q;
            for (i, &(g, _)) in gens.iter().enumerate() {
                x = (x as u128 * mod_pow(g, exps[i], q) as u128 % q as u128) as u64;
            }
            dlog[x as usize] = Some(exps.clone());
            for i in 0..exps.len() {
                exps[i] += 1;
                if exps[i] < gens[i].1 {
                    break;
                }
                exps[i] = 0;
            }
        }
        if q == 1 {
            dlog[0] = Some(vec![]);
        }
        UnitGroup { modulus: q, gens, dlog }
    }
}

/// A Dirichlet character mod q, stored exactly: χ(n) = e(exps[n]/order).
#[derive(Debug, Clone)]
pub struct CharacterHandle {
    modulus: u64,
    order: u64,
    exps: Arc<Vec<Option<u64>>>,
    values: Arc<Vec<Complex64>>,
    conductor: u64,
    is_primitive: bool,
    is_trivial: bool,
    /// exponent vector on the generators of (Z/qZ)^*, when built by enumeration
    label: Vec<u64>,
}

impl PartialEq for CharacterHandle {
    fn eq(&self, other: &Self) -> bool {
        self.modulus == other.modulus && self.order == other.order && self.exps == other.exps
    }
}

impl CharacterHandle {
    /// Build from an exponent table with common denominator `den`.
    pub fn from_exponents(modulus: u64, den: u64, exps: Vec<Option<u64>>, label: Vec<u64>) -> Self {
        assert_eq!(exps.len() as u64, modulus);
        let g = exps.iter().flatten().fold(den, |acc, &x| acc.gcd(&(x % den)));
        let order = den / g;
        let exps: Vec<Option<u64>> = exps.into_iter().map(|e| e.map(|x| (x % den) / g)).collect();
        let values = exps
            .iter()
            .map(|e| match e {
                Some(x) => e_frac(*x as f64 / order as f64),
                None => Complex64::new(0.0, 0.0),
            })
            .collect();
        let is_trivial = order == 1;
        let conductor = (1..=modulus)
            .filter(|d| modulus % d == 0)
            .find(|&d| {
                (0..modulus).all(|n| exps[n as usize].is_none() || n % d != 1 % d || exps[n as usize] == Some(0))
            })
            .unwrap();
        CharacterHandle {
            modulus,
            order,
            exps: Arc::new(exps),
            values: Arc::new(values),
            conductor,
            is_primitive: conductor == modulus,
            is_trivial,
            label,
        }
    }

    pub fn trivial(modulus: u64) -> Self {
        let exps = (0..modulus).map(|n| (gcd(n, modulus) == 1).then_some(0)).collect();
        Self::from_exponents(modulus, 1, exps, vec![])
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }
    pub fn order(&self) -> u64 {
        self.order
    }
    pub fn conductor(&self) -> u64 {
        self.conductor
    }
    pub fn is_primitive(&self) -> bool {
        self.is_primitive
    }
    pub fn is_trivial(&self) -> bool {
        self.is_trivial
    }
    pub fn label(&self) -> &[u64] {
        &self.label
    }
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn value(&self, n: i64) -> Complex64 {
        self.values[n.rem_euclid(self.modulus as i64) as usize]
    }

    /// χ(n) = e(num/order), or None when gcd(n, q) > 1.
    pub fn exponent(&self, n: i64) -> Option<u64> {
        self.exps[n.rem_euclid(self.modulus as i64) as usize]
    }

    pub fn is_real(&self) -> bool {
        self.order <= 2
    }

    pub fn conj(&self) -> Self {
        let exps = self.exps.iter().map(|e| e.map(|x| (self.order - x) % self.order)).collect();
        let label = self.label.clone();
        Self::from_exponents(self.modulus, self.order, exps, label)
    }

    /// The character mod `modulus` (a multiple of q) induced by χ.
    pub fn lift(&self, modulus: u64) -> Self {
        assert_eq!(modulus % self.modulus, 0);
        let exps = (0..modulus)
            .map(|n| if gcd(n, modulus) == 1 { self.exps[(n % self.modulus) as usize] } else { None })
            .collect();
        Self::from_exponents(modulus, self.order, exps, vec![])
    }

    /// Product of two characters, as a character mod lcm of the moduli.
    pub fn mul(&self, other: &Self) -> Self {
        let m = self.modulus.lcm(&other.modulus);
        let den = self.order.lcm(&other.order);
        let (sa, sb) = (den / self.order, den / other.order);
        let exps = (0..m)
            .map(|n| {
                let a = self.exps[(n % self.modulus) as usize]?;
                let b = other.exps[(n % other.modulus) as usize]?;
                Some((a * sa + b * sb) % den)
            })
            .collect();
        Self::from_exponents(m, den, exps, vec![])
    }

    pub fn pow(&self, k: u64) -> Self {
        let exps = self.exps.iter().map(|e| e.map(|x| x * k % self.order)).collect();
        Self::from_exponents(self.modulus, self.order, exps, vec![])
    }
}

fn character_cache() -> &'static Mutex<HashMap<u64, Arc<Vec<CharacterHandle>>>> {
    static C: OnceLock<Mutex<HashMap<u64, Arc<Vec<CharacterHandle>>>>> = OnceLock::new();
    C.get_or_init(|| Mutex::new(HashMap::new()))
}

/// All φ(q) characters mod q, trivial first, ordered by their exponent
/// vectors on the generators (for prime q the generator is the smallest
/// primitive root, so index k means χ(g) = e(k/(q−1))).
pub fn enumerate_characters(q: u64) -> Result<Arc<Vec<CharacterHandle>>> {
    enumerate_characters_capped(q, DEFAULT_MODULUS_CAP)
}

pub fn enumerate_characters_capped(q: u64, cap: u64) -> Result<Arc<Vec<CharacterHandle>>> {
    if q == 0 {
        return Err(Error::InvalidInput("modulus must be positive".into()));
    }
    if q > cap {
        return Err(Error::CapExceeded { requested: q, cap });
    }
    if let Some(v) = character_cache().lock().unwrap().get(&q) {
        return Ok(v.clone());
    }
    let grp = UnitGroup::new(q);
    debug_assert_eq!(grp.modulus, q);
    let den: u64 = grp.gens.iter().fold(1, |acc, g| acc.lcm(&g.1));
    let count: u64 = grp.gens.iter().map(|g| g.1).product();
    let mut out = Vec::with_capacity(count as usize);
    let mut k = vec![0u64; grp.gens.len()];
    for _ in 0..count {
        let exps = grp
            .dlog
            .iter()
            .map(|d| {
                d.as_ref().map(|v| {
                    v.iter()
                        .zip(&k)
                        .zip(&grp.gens)
                        .map(|((e, ki), g)| e * ki % g.1 * (den / g.1))
                        .sum::<u64>()
                        % den
                })
            })
            .collect();
        out.push(CharacterHandle::from_exponents(q, den, exps, k.clone()));
        for i in 0..k.len() {
            k[i] += 1;
            if k[i] < grp.gens[i].1 {
                break;
            }
            k[i] = 0;
        }
    }
    let out = Arc::new(out);
    character_cache().lock().unwrap().insert(q, out.clone());
    Ok(out)
}

/// The character mod prime p sending the smallest primitive root to e(1/(p−1)).
pub fn psi_p(p: u64) -> Result<CharacterHandle> {
    if !is_prime(p) {
        return Err(Error::InvalidInput(format!("{p} is not prime")));
    }
    let chars = enumerate_characters(p)?;
    Ok(chars[if p == 2 { 0 } else { 1 }].clone())
}

#[derive(Debug, Clone)]
pub struct GaussSumValue {
    pub character: CharacterHandle,
    pub value: Complex64,
}

pub fn gauss_sum(chi: &CharacterHandle) -> GaussSumValue {
    let q = chi.modulus();
    let value = (0..q).map(|n| chi.value(n as i64) * e_frac(n as f64 / q as f64)).sum();
    GaussSumValue { character: chi.clone(), value }
}

/// True when q = 1 or q is a prime not dividing `level`.
pub fn in_q_set(q: u64, level: u64) -> bool {
    q == 1 || (is_prime(q) && level % q != 0)
}

/// Coefficients of the expansion e(m/q) = Σ_χ w_χ χ(m) + const, q ∈ {1} ∪ primes:
/// returns (constant (q−1)/φ(q), [(χ, weight)]) with the trivial weight
/// (q/φ(q))τ(χ₀) first, then (1/φ(q))τ(χ̄) for χ ≠ χ₀.
pub fn additive_expansion(q: u64) -> Result<(f64, Vec<(CharacterHandle, Complex64)>)> {
    if !(q == 1 || is_prime(q)) {
        return Err(Error::InvalidInput(format!("expansion needs q = 1 or prime, got {q}")));
    }
    let chars = enumerate_characters(q)?;
    let phi = euler_phi(q) as f64;
    let mut terms = Vec::with_capacity(chars.len());
    for chi in chars.iter() {
        let w = if chi.is_trivial() {
            gauss_sum(chi).value * (q as f64 / phi)
        } else {
            gauss_sum(&chi.conj()).value / phi
        };
        terms.push((chi.clone(), w));
    }
    Ok(((q as f64 - 1.0) / phi, terms))
}

pub fn additive_expansion_residual(q: u64, a: i64) -> Result<f64> {
    if gcd(a.unsigned_abs(), q) != 1 {
        return Err(Error::InvalidInput(format!("gcd({a}, {q}) > 1")));
    }
    let (c, terms) = additive_expansion(q)?;
    let mut worst = 0.0f64;
    for n in 0..q as i64 {
        let m = n * a;
        let lhs = e_frac((m.rem_euclid(q as i64)) as f64 / q as f64);
        let rhs: Complex64 = terms.iter().map(|(chi, w)| chi.value(m) * w).sum::<Complex64>() + c;
        worst = worst.max((lhs - rhs).norm());
    }
    Ok(worst)
}
