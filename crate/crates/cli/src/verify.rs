use anyhow::Result;
use clap::ValueEnum;
use l2lab::arithmetic::{additive_expansion_residual, enumerate_characters, euler_phi, gauss_sum, is_prime};
use l2lab::exponents::constant_checks;
use l2lab::forms::{coefficient_table, FormDescriptor};
use l2lab::lfunc::{
    afe_l, afe_lambda, delta_aq_functional_equation_residual, direct_series, functional_equation_residual, g_value,
    gamma_factor, h_value, level_one_closed_form, local_factor, twist_distinctness, vandermonde_weights, SeriesKind,
    DEFAULT_SERIES_CUTOFF,
};
use l2lab::zeros::{explicit_formula_terms, scan_cached};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Zero};
use serde_json::json;
use std::collections::HashMap;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Arithmetic,
    Afe,
    FunctionalEq,
    HIdentities,
    ExplicitFormula,
    LocalFactors,
    Exponents,
    All,
}

impl Suite {
    fn name(self) -> &'static str {
        match self {
            Suite::Arithmetic => "arithmetic",
            Suite::Afe => "afe",
            Suite::FunctionalEq => "functional-eq",
            Suite::HIdentities => "h-identities",
            Suite::ExplicitFormula => "explicit-formula",
            Suite::LocalFactors => "local-factors",
            Suite::Exponents => "exponents",
            Suite::All => "all",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub note: Option<String>,
}

impl Check {
    pub fn json(&self) -> String {
        let mut v = json!({
            "suite": self.suite,
            "check": self.name,
            "residual": if self.residual.is_finite() { json!(self.residual) } else { json!(null) },
            "tolerance": self.tolerance,
            "pass": self.pass,
        });
        if let Some(n) = &self.note {
            v["note"] = json!(n);
        }
        v.to_string()
    }
}

/// Default tolerances, overridable by NAME=VAL.
pub struct Tolerances(HashMap<String, f64>);

impl Tolerances {
    pub fn new(overrides: &[(String, f64)]) -> Self {
        let mut m: HashMap<String, f64> = [
            ("orthogonality", 1e-10),
            ("gauss", 1e-10),
            ("expansion", 1e-12),
            ("afe", 1e-8),
            ("functional-eq", 1e-7),
            ("prop21", 1e-6),
            ("h-identities", 1e-8),
            ("explicit-formula", 1e-5),
            ("explicit-stability", 1e-8),
            ("local-factors", 1e-10),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
        for (k, v) in overrides {
            m.insert(k.clone(), *v);
        }
        Tolerances(m)
    }

    pub fn get(&self, name: &str) -> f64 {
        self.0[name]
    }

    pub fn known(name: &str) -> bool {
        Tolerances::new(&[]).0.contains_key(name)
    }
}

struct Out<'a> {
    suite: &'static str,
    tol: &'a Tolerances,
    checks: Vec<Check>,
}

impl Out<'_> {
    fn push(&mut self, name: String, tol_name: &str, r: l2lab::Result<f64>) {
        let tolerance = if tol_name.is_empty() { 0.0 } else { self.tol.get(tol_name) };
        let (residual, note) = match r {
            Ok(v) => (v, None),
            Err(e) => (f64::INFINITY, Some(e.to_string())),
        };
        let pass = if tol_name.is_empty() { residual == 0.0 } else { residual < tolerance };
        self.checks.push(Check { suite: self.suite, name, residual, tolerance, pass, note });
    }
}

pub fn run(suite: Suite, tol: &Tolerances, form: &dyn Fn(&str) -> Result<FormDescriptor>) -> Result<Vec<Check>> {
    if suite == Suite::All {
        let mut all = Vec::new();
        for s in [
            Suite::Exponents,
            Suite::Arithmetic,
            Suite::LocalFactors,
            Suite::Afe,
            Suite::FunctionalEq,
            Suite::HIdentities,
            Suite::ExplicitFormula,
        ] {
            all.extend(run(s, tol, form)?);
        }
        return Ok(all);
    }
    let mut out = Out { suite: suite.name(), tol, checks: Vec::new() };
    let registry = ["delta", "ec11", "ec32"];
    match suite {
        Suite::Exponents => {
            for c in constant_checks()? {
                let r = if c.passes() { 0.0 } else { 1.0 };
                out.push(format!("{} = {}", c.name, c.value), "", Ok(r));
            }
        }
        Suite::Arithmetic => arithmetic(&mut out, form)?,
        Suite::Afe => {
            for name in registry {
                let f = form(name)?;
                let worst = (0..20)
                    .map(|j| {
                        let s = Complex64::new(2.0, -9.5 + j as f64);
                        let a = afe_l(&f, s)?.value;
                        let d = direct_series(&f, s, SeriesKind::L, DEFAULT_SERIES_CUTOFF)?.value;
                        Ok((a - d).norm() / d.norm())
                    })
                    .try_fold(0.0f64, |m, r: l2lab::Result<f64>| r.map(|v| m.max(v)));
                out.push(format!("{name}: max |AFE - series|/|series| over 20 points on Re s = 2"), "afe", worst);
            }
        }
        Suite::FunctionalEq => {
            for name in registry {
                let f = form(name)?;
                let worst = [0.25, 0.5, 0.75]
                    .iter()
                    .flat_map(|&x| [-6.5, 2.5, 12.5].map(move |y| Complex64::new(x, y)))
                    .map(|s| {
                        let lam = afe_lambda(&f, s)?.value.norm();
                        Ok(functional_equation_residual(&f, s)? * lam.max(1.0) / lam)
                    })
                    .try_fold(0.0f64, |m, r: l2lab::Result<f64>| r.map(|v| m.max(v)));
                out.push(format!("{name}: functional equation, 9 strip points, relative"), "functional-eq", worst);
            }
            for name in ["delta", "ec11"] {
                let f = form(name)?;
                for (a, q) in [(1i64, 3u64), (2, 5)] {
                    for s in [Complex64::new(1.4, 2.0), Complex64::new(2.0, 0.0), Complex64::new(1.3, -1.0)] {
                        let r = delta_aq_functional_equation_residual(&f, s, a, q).map(|(r, mag, _)| r / mag);
                        out.push(format!("{name}: Delta_(f,{a},{q}) functional equation at {s}, relative"), "prop21", r);
                    }
                }
            }
        }
        Suite::HIdentities => h_identities(&mut out, form)?,
        Suite::ExplicitFormula => {
            let f = form("delta")?;
            let z = Complex64::new(1.0 / 3.0, 0.5);
            scan_cached(&f, 60.0)?;
            let t30 = explicit_formula_terms(&f, 1, 1, z, 30.0);
            let t60 = explicit_formula_terms(&f, 1, 1, z, 60.0);
            out.push("delta: explicit formula, z = 1/3 + i/2, T = 30".into(), "explicit-formula", t30.as_ref().map(|t| t.residual).map_err(|e| e.clone()));
            let change = match (&t30, &t60) {
                (Ok(a), Ok(b)) => Ok((a.residual - b.residual).abs()),
                (Err(e), _) | (_, Err(e)) => Err(e.clone()),
            };
            out.push("delta: residual change from T = 30 to T = 60".into(), "explicit-stability", change);
        }
        Suite::LocalFactors => {
            for name in registry {
                let f = form(name)?;
                for q in [2u64, 3, 5, 7, 11, 13] {
                    if f.level() % q == 0 {
                        continue;
                    }
                    out.push(format!("{name}: R/P relation at q = {q}"), "local-factors", local_factor(&f, q).map(|l| l.relation_residual));
                }
            }
            for (name, q) in [("delta", 5u64), ("ec11", 2)] {
                let f = form(name)?;
                let r = local_factor(&f, q).map(|lf| {
                    let lq = (q as f64).ln();
                    let s0 = Complex64::new(0.0, lf.theta / lq);
                    let (n, rad) = (64, 1e-2);
                    let mut acc = Complex64::new(0.0, 0.0);
                    for j in 0..n {
                        let w = Complex64::from_polar(1.0, 2.0 * PI * j as f64 / n as f64);
                        acc += lf.r((-(s0 + rad * w) * lq).exp()) * rad * w;
                    }
                    (acc / n as f64 - lf.r_residue()).norm() / lf.r_residue().norm()
                });
                out.push(format!("{name}: residue of R at i*theta/log {q}, contour vs closed form"), "local-factors", r);
            }
        }
        Suite::All => unreachable!(),
    }
    Ok(out.checks)
}

fn arithmetic(out: &mut Out, form: &dyn Fn(&str) -> Result<FormDescriptor>) -> Result<()> {
    let (mut orth, mut gauss, mut expa) = (0.0f64, 0.0f64, 0.0f64);
    for q in 1..=50u64 {
        let chars = enumerate_characters(q)?;
        let phi = euler_phi(q) as f64;
        for (i, a) in chars.iter().enumerate() {
            for (j, b) in chars.iter().enumerate() {
                let s: Complex64 = (0..q as i64).map(|n| a.value(n) * b.value(n).conj()).sum();
                let want = if i == j { phi } else { 0.0 };
                orth = orth.max((s - want).norm());
            }
            if a.is_primitive() && q > 1 {
                gauss = gauss.max((gauss_sum(a).value.norm() - (q as f64).sqrt()).abs());
            }
        }
        if is_prime(q) {
            for a in 1..q as i64 {
                expa = expa.max(additive_expansion_residual(q, a)?);
            }
        }
    }
    out.push("character orthogonality, q <= 50".into(), "orthogonality", Ok(orth));
    out.push("primitive Gauss sum modulus, q <= 50".into(), "gauss", Ok(gauss));
    out.push("additive expansion, prime q <= 50".into(), "expansion", Ok(expa));
    for name in ["delta", "ec11", "ec32"] {
        let f = form(name)?;
        let t = coefficient_table(&f, 100_000)?;
        let mut worst = 0.0f64;
        for n in 1..=100_000u64 {
            let d = l2lab::arithmetic::divisor_count(n) as f64;
            worst = worst.max(t.values[n as usize].norm() - d);
        }
        out.push(format!("{name}: max(|lambda(n)| - d(n)) for n <= 1e5"), "", Ok(if worst <= 1e-9 { 0.0 } else { worst }));
    }
    Ok(())
}

fn h_identities(out: &mut Out, form: &dyn Fn(&str) -> Result<FormDescriptor>) -> Result<()> {
    let rel = |a: Complex64, b: Complex64| (a - b).norm() / b.norm();
    for (name, p) in [("delta", 5i64), ("ec32", 97)] {
        let f = form(name)?;
        let s = Complex64::new(2.0, 1.0);
        let r = (|| {
            let w = ((1.0 - 2.0 * s) * (p as f64).ln()).exp();
            let h1 = h_value(&f, Rational64::from_integer(1), s)?.value;
            let hp = h_value(&f, Rational64::new(1, p), s)?.value;
            let g = gamma_factor(&f, s)?;
            let d = direct_series(&f, s, SeriesKind::D, DEFAULT_SERIES_CUTOFF)?.value;
            let dp = direct_series(&f, s, SeriesKind::DAdditive(Rational64::new(1, p)), DEFAULT_SERIES_CUTOFF)?.value;
            Ok(rel(w * h1 - hp, g * (w * d - dp)))
        })();
        out.push(format!("{name}: first H difference, p = {p}, s = {s}"), "h-identities", r);
    }
    let f = form("ec11")?;
    let (p, d) = (23i64, 2i64);
    for t in [-2.0, -1.0, 0.0, 1.0, 2.0] {
        let s = Complex64::new(2.0, t);
        let r = (|| {
            let w = ((1.0 - 2.0 * s) * (p as f64).ln()).exp();
            let h = |a: Rational64| h_value(&f, a, s).map(|v| v.value);
            let lhs = w * h(Rational64::from_integer(d))? - h(Rational64::new(d, p))? - w * h(Rational64::from_integer(1))?
                + h(Rational64::new(1, p))?;
            Ok(rel(lhs, g_value(&f, p as u64, s)?.value))
        })();
        out.push(format!("ec11: key H difference, p = 23, d = 2, s = {s}"), "h-identities", r);
    }
    let delta = form("delta")?;
    let r = level_one_closed_form(&delta, Complex64::new(2.0, 0.0)).map(|(l, r)| rel(l.value, r.value));
    out.push("delta: level-one closed form at p = 2, s = 2".into(), "h-identities", r);
    let qs = [3u64, 5, 7, 11];
    for m in 1..=4 {
        for m0 in 0..m {
            let w = vandermonde_weights(&qs[..m], m0)?;
            let exact = (0..m).all(|row| {
                let s: BigRational = w
                    .iter()
                    .zip(&qs[..m])
                    .map(|(c, &q)| c.clone() / BigRational::from_integer(BigInt::from(q).pow(row as u32)))
                    .fold(BigRational::zero(), |a, b| a + b);
                s == if row == m0 { BigRational::one() } else { BigRational::zero() }
            });
            out.push(format!("Vandermonde delta property, M = {m}, m0 = {m0}"), "", Ok(if exact { 0.0 } else { 1.0 }));
        }
    }
    for (name, p) in [("delta", 3u64), ("ec11", 23)] {
        let f = form(name)?;
        let r = twist_distinctness(&f, p, 1.0).map(|d| if d.difference > d.error && d.witness_gap > 0.0 { 0.0 } else { 1.0 });
        out.push(format!("{name}: twists by 1/{p} and -N'/{p} differ at t = 1"), "", r);
    }
    for name in ["delta", "ec11"] {
        let f = form(name)?;
        let p = f.level() + 1;
        let rejected = g_value(&f, p, Complex64::new(2.0, 0.0)).is_err();
        out.push(format!("{name}: p = N + 1 = {p} rejected"), "", Ok(if rejected { 0.0 } else { 1.0 }));
    }
    Ok(())
}
