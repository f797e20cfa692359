//! Primitive forms, their normalized Hecke eigenvalues and twists.

pub mod curve;
mod dseries;
pub mod eta;
pub mod registry;

pub use curve::{discriminant, ec_ap, ec_ap_capped, Weierstrass};
pub use dseries::{
    d_series_coefficients, rankin_prime_sum, satake_power_sums, twisted_r_coefficients,
    DSeriesCoefficients,
};
pub use registry::{RegistryEntry, BUILTIN_REGISTRY};

use crate::arithmetic::{gauss_sum, gcd, smallest_prime_factors, CharacterHandle};
use crate::{Complex64, Error, Result};
use rayon::prelude::*;
use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::sync::{Arc, Mutex, OnceLock, RwLock};

/// Largest coefficient index any table will be built to.
pub const DEFAULT_COEFF_CAP: usize = 250_000;

#[derive(Clone)]
pub enum CoefficientSource {
    Eta24,
    Curve(Weierstrass),
    Twist { base: FormDescriptor, chi: CharacterHandle },
}

struct FormInner {
    key: String,
    name: String,
    weight: u32,
    level: u64,
    nebentypus: CharacterHandle,
    source: CoefficientSource,
    root_number: OnceLock<Complex64>,
}

/// A primitive holomorphic form. Cheap to clone; instances with the same key
/// are interned so the root-number cache is shared.
#[derive(Clone)]
pub struct FormDescriptor(Arc<FormInner>);

impl fmt::Debug for FormDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Form({}, k={}, N={})", self.0.name, self.0.weight, self.0.level)
    }
}

impl PartialEq for FormDescriptor {
    fn eq(&self, other: &Self) -> bool {
        self.0.key == other.0.key
    }
}

fn interned() -> &'static Mutex<HashMap<String, FormDescriptor>> {
    static M: OnceLock<Mutex<HashMap<String, FormDescriptor>>> = OnceLock::new();
    M.get_or_init(|| Mutex::new(HashMap::new()))
}

fn intern(inner: FormInner) -> FormDescriptor {
    let mut m = interned().lock().unwrap();
    m.entry(inner.key.clone()).or_insert_with(|| FormDescriptor(Arc::new(inner))).clone()
}

impl FormDescriptor {
    pub fn from_entry(e: &RegistryEntry) -> Result<Self> {
        let source = match (e.source.as_str(), e.curve) {
            ("eta24", _) => CoefficientSource::Eta24,
            ("curve", Some(c)) => CoefficientSource::Curve(c),
            _ => return Err(Error::InvalidInput(format!("bad source for {}", e.name))),
        };
        Ok(intern(FormInner {
            key: e.name.clone(),
            name: e.name.clone(),
            weight: e.weight,
            level: e.level,
            nebentypus: CharacterHandle::trivial(e.level),
            source,
            root_number: OnceLock::new(),
        }))
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }
    pub fn key(&self) -> &str {
        &self.0.key
    }
    pub fn weight(&self) -> u32 {
        self.0.weight
    }
    pub fn level(&self) -> u64 {
        self.0.level
    }
    pub fn nebentypus(&self) -> &CharacterHandle {
        &self.0.nebentypus
    }
    pub fn source(&self) -> &CoefficientSource {
        &self.0.source
    }

    /// ξ(n).
    pub fn xi(&self, n: u64) -> Complex64 {
        self.0.nebentypus.value(n as i64)
    }

    pub fn is_twist(&self) -> bool {
        matches!(self.0.source, CoefficientSource::Twist { .. })
    }

    /// Registry forms are self-dual with real coefficients; a twist is
    /// self-dual exactly when its character is real.
    pub fn is_self_dual(&self) -> bool {
        match &self.0.source {
            CoefficientSource::Twist { chi, .. } => chi.is_real(),
            _ => true,
        }
    }

    pub fn dual(&self) -> FormDescriptor {
        match &self.0.source {
            CoefficientSource::Twist { base, chi } if !chi.is_real() => {
                twist_form(&base.dual(), &chi.conj()).expect("conjugate of a valid twist is valid")
            }
            _ => self.clone(),
        }
    }

    pub fn cached_root_number(&self) -> Option<Complex64> {
        self.0.root_number.get().copied()
    }

    /// Write-once; later calls keep the first value.
    pub fn store_root_number(&self, eps: Complex64) -> Complex64 {
        *self.0.root_number.get_or_init(|| eps)
    }

    /// ε_f ξ(q) χ(N) τ(χ)²/q for f⊗χ, from the base root number.
    pub fn twist_root_number_formula(&self) -> Option<Complex64> {
        let CoefficientSource::Twist { base, chi } = &self.0.source else { return None };
        let eps = base.cached_root_number()?;
        let q = chi.modulus();
        let tau = gauss_sum(chi).value;
        Some(eps * base.xi(q) * chi.value(base.level() as i64) * tau * tau / q as f64)
    }
}

/// f⊗χ for primitive χ mod q with gcd(q, N) = 1; χ mod 1 returns f.
pub fn twist_form(form: &FormDescriptor, chi: &CharacterHandle) -> Result<FormDescriptor> {
    let q = chi.modulus();
    if q == 1 {
        return Ok(form.clone());
    }
    if form.is_twist() {
        return Err(Error::InvalidInput("twisting a twist is not supported".into()));
    }
    if !chi.is_primitive() {
        return Err(Error::InvalidInput(format!("character mod {q} is not primitive")));
    }
    if gcd(q, form.level()) != 1 {
        return Err(Error::InvalidInput(format!("gcd({q}, {}) > 1", form.level())));
    }
    let level = form.level() * q * q;
    let neb = form.nebentypus().mul(&chi.pow(2)).lift(level);
    let exps: Vec<String> = (0..q).map(|n| chi.exponent(n as i64).map_or("-".into(), |e| e.to_string())).collect();
    let key = format!("{}*chi{}/{}[{}]", form.key(), q, chi.order(), exps.join(","));
    let name = match chi.label() {
        [] => format!("{}*chi{}", form.name(), q),
        l => format!("{}*chi{}_{}", form.name(), q, l.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(".")),
    };
    Ok(intern(FormInner {
        key,
        name,
        weight: form.weight(),
        level,
        nebentypus: neb,
        source: CoefficientSource::Twist { base: form.clone(), chi: chi.clone() },
        root_number: OnceLock::new(),
    }))
}

/// A set of registry forms.
#[derive(Debug, Clone)]
pub struct Registry {
    entries: Vec<RegistryEntry>,
}

impl Registry {
    pub fn builtin() -> Self {
        Registry { entries: registry::parse_registry(BUILTIN_REGISTRY).expect("builtin registry") }
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Ok(Registry { entries: registry::load_registry(path)? })
    }

    pub fn names(&self) -> Vec<&str> {
        self.entries.iter().map(|e| e.name.as_str()).collect()
    }

    pub fn get(&self, name: &str) -> Result<FormDescriptor> {
        let e = self
            .entries
            .iter()
            .find(|e| e.name == name)
            .ok_or_else(|| Error::InvalidInput(format!("unknown form '{name}'")))?;
        FormDescriptor::from_entry(e)
    }

    pub fn forms(&self) -> Result<Vec<FormDescriptor>> {
        self.entries.iter().map(FormDescriptor::from_entry).collect()
    }
}

/// Shorthand for a builtin registry form.
pub fn registry_form(name: &str) -> Result<FormDescriptor> {
    Registry::builtin().get(name)
}

/// Normalized coefficients λ(1..=limit); index 0 holds 0.
#[derive(Debug, Clone)]
pub struct CoefficientTable {
    pub form_key: String,
    pub limit: usize,
    pub values: Vec<Complex64>,
}

impl CoefficientTable {
    pub fn get(&self, n: usize) -> Complex64 {
        self.values[n]
    }
}

fn check_cap(limit: usize) -> Result<()> {
    if limit > DEFAULT_COEFF_CAP {
        return Err(Error::CapExceeded { requested: limit as u64, cap: DEFAULT_COEFF_CAP as u64 });
    }
    Ok(())
}

/// λ(n) = τ(n)/n^{11/2} directly from the eta-product series.
pub fn delta_tau_table(limit: usize) -> Result<CoefficientTable> {
    check_cap(limit)?;
    let tau = eta::tau_by_power(limit);
    Ok(CoefficientTable {
        form_key: "delta".into(),
        limit,
        values: normalize(&tau, 12),
    })
}

fn normalize(a: &[i128], weight: u32) -> Vec<Complex64> {
    let e = (weight as f64 - 1.0) / 2.0;
    a.iter()
        .enumerate()
        .map(|(n, &v)| if n == 0 { Complex64::new(0.0, 0.0) } else { Complex64::new(v as f64 / (n as f64).powf(e), 0.0) })
        .collect()
}

/// Exact a(n), n ≤ limit, from a(p) by the Hecke recursion
/// a(p^{j+1}) = a(p)a(p^j) − [p∤N] p^{k−1} a(p^{j−1}) and multiplicativity.
pub fn hecke_extend(ap: &[i128], weight: u32, level: u64) -> Vec<i128> {
    let limit = ap.len() - 1;
    let spf = smallest_prime_factors(limit);
    let mut a = vec![0i128; limit + 1];
    if limit >= 1 {
        a[1] = 1;
    }
    for n in 2..=limit {
        let p = spf[n] as usize;
        let mut pe = p;
        let mut m = n / p;
        while m % p == 0 {
            m /= p;
            pe *= p;
        }
        if m > 1 {
            a[n] = a[pe] * a[m];
        } else if n == p {
            a[n] = ap[p];
        } else {
            let good = level % p as u64 != 0;
            let pk = if good { (p as i128).pow(weight - 1) } else { 0 };
            a[n] = ap[p] * a[n / p] - pk * a[n / p / p];
        }
    }
    a
}

fn base_integers(form: &FormDescriptor, limit: usize) -> Result<Vec<i128>> {
    let spf = smallest_prime_factors(limit);
    let mut ap = vec![0i128; limit + 1];
    match form.source() {
        CoefficientSource::Eta24 => {
            let tau = eta::tau_by_power(limit);
            for p in 2..=limit {
                if spf[p] as usize == p {
                    ap[p] = tau[p];
                }
            }
        }
        CoefficientSource::Curve(c) => {
            let primes: Vec<usize> = (2..=limit).filter(|&p| spf[p] as usize == p).collect();
            let vals: Vec<(usize, i64)> = primes
                .par_chunks(256)
                .flat_map_iter(|chunk| {
                    let mut scratch = Vec::new();
                    chunk
                        .iter()
                        .map(|&p| (p, curve::ap_with_scratch(c, p as u64, &mut scratch)))
                        .collect::<Vec<_>>()
                })
                .collect();
            for (p, v) in vals {
                ap[p] = v as i128;
            }
        }
        CoefficientSource::Twist { .. } => unreachable!("twists derive from base tables"),
    }
    Ok(hecke_extend(&ap, form.weight(), form.level()))
}

type IntCache = RwLock<HashMap<String, Arc<Vec<i128>>>>;
type TableCache = RwLock<HashMap<String, Arc<CoefficientTable>>>;

fn int_cache() -> &'static IntCache {
    static C: OnceLock<IntCache> = OnceLock::new();
    C.get_or_init(Default::default)
}
fn table_cache() -> &'static TableCache {
    static C: OnceLock<TableCache> = OnceLock::new();
    C.get_or_init(Default::default)
}
fn build_lock() -> &'static Mutex<()> {
    static L: Mutex<()> = Mutex::new(());
    &L
}

/// Exact unnormalized coefficients of a registry form, memoized and
/// optionally persisted in the cache directory.
pub fn integer_coefficients(form: &FormDescriptor, limit: usize) -> Result<Arc<Vec<i128>>> {
    check_cap(limit)?;
    if form.is_twist() {
        return Err(Error::InvalidInput("integer tables exist for registry forms only".into()));
    }
    let lookup = || {
        int_cache().read().unwrap().get(form.key()).filter(|t| t.len() > limit).cloned()
    };
    if let Some(t) = lookup() {
        return Ok(t);
    }
    let _guard = build_lock().lock().unwrap();
    if let Some(t) = lookup() {
        return Ok(t);
    }
    // build a little beyond the request so nearby requests hit the cache
    let target = (limit.max(1000) * 5 / 4).min(DEFAULT_COEFF_CAP).max(limit);
    let path = registry::cache_dir().map(|d| d.join(format!("{}.coef", form.key())));
    let mut table = None;
    if let Some(p) = &path {
        table = registry::read_coefficient_cache(p, form.key(), limit).ok().flatten();
    }
    let table = match table {
        Some(t) => t,
        None => {
            let t = base_integers(form, target)?;
            if let Some(p) = &path {
                // a failed cache write is not fatal
                let _ = registry::write_coefficient_cache(p, form.key(), &t);
            }
            t
        }
    };
    let t = Arc::new(table);
    int_cache().write().unwrap().insert(form.key().to_string(), t.clone());
    Ok(t)
}

/// Normalized λ(1..=limit) for any form (registry or twist).
pub fn coefficient_table(form: &FormDescriptor, limit: usize) -> Result<Arc<CoefficientTable>> {
    check_cap(limit)?;
    let lookup = || table_cache().read().unwrap().get(form.key()).filter(|t| t.limit >= limit).cloned();
    if let Some(t) = lookup() {
        return Ok(t);
    }
    let table = match form.source() {
        CoefficientSource::Twist { base, chi } => {
            let b = coefficient_table(base, limit)?;
            let values = (0..=b.limit).map(|n| b.values[n] * chi.value(n as i64)).collect();
            CoefficientTable { form_key: form.key().into(), limit: b.limit, values }
        }
        _ => {
            let a = integer_coefficients(form, limit)?;
            CoefficientTable { form_key: form.key().into(), limit: a.len() - 1, values: normalize(&a, form.weight()) }
        }
    };
    let t = Arc::new(table);
    table_cache().write().unwrap().insert(form.key().to_string(), t.clone());
    Ok(t)
}

/// λ_f(n).
pub fn lambda(form: &FormDescriptor, n: u64) -> Result<Complex64> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be positive".into()));
    }
    Ok(coefficient_table(form, (n as usize).max(1000))?.values[n as usize])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arithmetic::{divisor_count, enumerate_characters};
    use proptest::prelude::*;

    #[test]
    fn delta_first_coefficients() {
        let t = delta_tau_table(10).unwrap();
        assert_eq!(t.values[1], Complex64::new(1.0, 0.0));
        assert!((t.values[2].re - (-24.0 / 2f64.powf(5.5))).abs() < 1e-15);
        assert!((t.values[6] - t.values[2] * t.values[3]).norm() < 1e-15);
        assert!(delta_tau_table(DEFAULT_COEFF_CAP + 1).is_err());
    }

    #[test]
    fn hecke_recursion_matches_series_exactly() {
        let delta = registry_form("delta").unwrap();
        let rec = integer_coefficients(&delta, 3200).unwrap();
        let series = eta::tau_by_power(3200);
        for p in [2usize, 3, 5] {
            let mut pj = p;
            for _ in 1..=5 {
                assert_eq!(rec[pj], series[pj], "p^j = {pj}");
                pj *= p;
            }
        }
        assert_eq!(rec[4], -1472);
        let l4 = lambda(&delta, 4).unwrap().re;
        let l2 = lambda(&delta, 2).unwrap().re;
        assert!((l4 - (l2 * l2 - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn level_eleven_multiplicative() {
        let f = registry_form("ec11").unwrap();
        let l22 = lambda(&f, 22).unwrap();
        assert!((l22 - lambda(&f, 2).unwrap() * lambda(&f, 11).unwrap()).norm() < 1e-15);
        // bad prime: λ(11^j) = λ(11)^j
        let l11 = lambda(&f, 11).unwrap();
        assert!((lambda(&f, 121).unwrap() - l11 * l11).norm() < 1e-15);
    }

    #[test]
    fn twist_properties() {
        let delta = registry_form("delta").unwrap();
        let chars = enumerate_characters(5).unwrap();
        let quad = chars.iter().find(|c| c.order() == 2).unwrap();
        let g = twist_form(&delta, quad).unwrap();
        assert_eq!(g.level(), 25);
        assert!(g.is_self_dual());
        assert_eq!(lambda(&g, 5).unwrap(), Complex64::new(0.0, 0.0));
        let base = coefficient_table(&delta, 1000).unwrap();
        let tw = coefficient_table(&g, 1000).unwrap();
        for n in 1..=1000usize {
            assert!(tw.values[n].im == 0.0);
            assert!(tw.values[n].norm() <= divisor_count(n as u64) as f64 + 1e-12);
            if n % 5 != 0 {
                assert!((tw.values[n] - base.values[n] * quad.value(n as i64)).norm() < 1e-15);
            }
        }
        let triv1 = CharacterHandle::trivial(1);
        assert_eq!(twist_form(&delta, &triv1).unwrap(), delta);
        assert!(twist_form(&delta, &chars[0]).is_err());
        let e11 = registry_form("ec11").unwrap();
        assert!(twist_form(&e11, &enumerate_characters(11).unwrap()[1]).is_err());
    }

    #[test]
    fn dual_of_complex_twist() {
        let delta = registry_form("delta").unwrap();
        let chi = crate::arithmetic::psi_p(7).unwrap();
        let g = twist_form(&delta, &chi).unwrap();
        assert!(!g.is_self_dual());
        let d = g.dual();
        assert_ne!(d, g);
        assert_eq!(d.dual(), g);
        let (a, b) = (coefficient_table(&g, 200).unwrap(), coefficient_table(&d, 200).unwrap());
        for n in 1..=200 {
            assert!((a.values[n].conj() - b.values[n]).norm() < 1e-14);
        }
        // nebentypus ξχ² has modulus 49 and values χ(n)²
        assert_eq!(g.nebentypus().modulus(), 49);
        assert!((g.xi(3) - chi.value(3) * chi.value(3)).norm() < 1e-14);
    }

    #[test]
    fn deligne_bound_small() {
        for name in ["delta", "ec11", "ec32"] {
            let f = registry_form(name).unwrap();
            let t = coefficient_table(&f, 5000).unwrap();
            for n in 1..=5000u64 {
                assert!(t.values[n as usize].norm() <= divisor_count(n) as f64 * (1.0 + 1e-12));
            }
        }
    }

    proptest! {
        #[test]
        fn tables_multiplicative(m in 1u64..300, n in 1u64..300) {
            prop_assume!(gcd(m, n) == 1);
            for name in ["delta", "ec11", "ec32"] {
                let f = registry_form(name).unwrap();
                let lhs = lambda(&f, m * n).unwrap();
                let rhs = lambda(&f, m).unwrap() * lambda(&f, n).unwrap();
                prop_assert!((lhs - rhs).norm() < 1e-12);
            }
        }
    }
}
