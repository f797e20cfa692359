use super::afe::{divisor_tail, g_table};
use super::{EvalResult, Method};
use crate::forms::{coefficient_table, d_series_coefficients, FormDescriptor, DEFAULT_COEFF_CAP};
use crate::{e_frac, Complex64, Error, Result};
use num_rational::Rational64;
use rayon::prelude::*;
use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

pub const DEFAULT_SERIES_CUTOFF: usize = 200_000;
pub const SERIES_SIGMA_FLOOR: f64 = 1.25;

/// Which Dirichlet series to sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SeriesKind {
    /// Σ λ(n) n^{-s}
    L,
    /// Σ λ(n) e(nα) n^{-s}
    LAdditive(Rational64),
    /// Σ c_f(n) n^{-s}
    D,
    /// Σ c_f(n) e(nα) n^{-s}
    DAdditive(Rational64),
    /// Σ c_{f,a,q}(n) n^{-s}
    DTwist { a: i64, q: u64 },
}

type DKey = (String, Option<(i64, u64)>);

fn d_cache() -> &'static RwLock<HashMap<DKey, Arc<Vec<Complex64>>>> {
    static C: OnceLock<RwLock<HashMap<DKey, Arc<Vec<Complex64>>>>> = OnceLock::new();
    C.get_or_init(Default::default)
}

fn d_coeffs(form: &FormDescriptor, limit: usize, twist: Option<(i64, u64)>) -> Result<Arc<Vec<Complex64>>> {
    let key = (form.key().to_string(), twist);
    if let Some(v) = d_cache().read().unwrap().get(&key).filter(|v| v.len() > limit) {
        return Ok(v.clone());
    }
    let v = Arc::new(d_series_coefficients(form, limit, twist)?.values);
    d_cache().write().unwrap().insert(key, v.clone());
    Ok(v)
}

fn phase(n: usize, alpha: Rational64) -> Complex64 {
    let (p, q) = (*alpha.numer() as i128, *alpha.denom() as i128);
    e_frac((n as i128 * p).rem_euclid(q) as f64 / q as f64)
}

/// Coefficients a(0..=limit) of the requested series.
pub(crate) fn series_coefficients(form: &FormDescriptor, kind: SeriesKind, limit: usize) -> Result<Arc<Vec<Complex64>>> {
    Ok(match kind {
        SeriesKind::L => Arc::new(coefficient_table(form, limit)?.values.clone()),
        SeriesKind::LAdditive(al) => {
            let t = coefficient_table(form, limit)?;
            Arc::new((0..=limit).map(|n| t.values[n] * phase(n, al)).collect())
        }
        SeriesKind::D => d_coeffs(form, limit, None)?,
        SeriesKind::DAdditive(al) => {
            let c = d_coeffs(form, limit, None)?;
            Arc::new((0..=limit).map(|n| c[n] * phase(n, al)).collect())
        }
        SeriesKind::DTwist { a, q } => d_coeffs(form, limit, Some((a, q)))?,
    })
}

fn check(s: Complex64, cutoff: usize) -> Result<()> {
    if s.re < SERIES_SIGMA_FLOOR {
        return Err(Error::InvalidInput(format!("Re(s) = {} below the series floor {SERIES_SIGMA_FLOOR}", s.re)));
    }
    if cutoff < 80 {
        return Err(Error::InvalidInput("cutoff too small".into()));
    }
    if cutoff > DEFAULT_COEFF_CAP {
        return Err(Error::CapExceeded { requested: cutoff as u64, cap: DEFAULT_COEFF_CAP as u64 });
    }
    Ok(())
}

/// Σ a(n) n^{-s} g(n/X), X = cutoff/40. The smooth weight removes the
/// sharp-edge tail; the error estimate is the change when X is halved.
pub fn direct_series(form: &FormDescriptor, s: Complex64, kind: SeriesKind, cutoff: usize) -> Result<EvalResult> {
    check(s, cutoff)?;
    let a = series_coefficients(form, kind, cutoff)?;
    let x = cutoff as f64 / 40.0;
    let g1 = g_table(x, cutoff);
    let g2 = g_table(x / 2.0, cutoff / 2);
    let chunks: Vec<(usize, usize)> = (1..=cutoff).step_by(4096).map(|lo| (lo, (lo + 4095).min(cutoff))).collect();
    let parts: Vec<(Complex64, Complex64, f64)> = chunks
        .par_iter()
        .map(|&(lo, hi)| {
            let (mut s1, mut s2, mut m) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), 0.0);
            for n in lo..=hi {
                if a[n] == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let t = a[n] * (-s * (n as f64).ln()).exp();
                s1 += t * g1[n];
                if n <= cutoff / 2 {
                    s2 += t * g2[n];
                }
                m += t.norm();
            }
            (s1, s2, m)
        })
        .collect();
    let (mut v1, mut v2, mut mag) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), 0.0);
    for (a, b, m) in parts {
        v1 += a;
        v2 += b;
        mag += m;
    }
    Ok(EvalResult::new(v1, (v1 - v2).norm() + 4.0 * f64::EPSILON * mag, Method::DirectSeries))
}

/// Σ_{n≤cutoff} a(n) n^{-s} with a crude d(n)-type tail bound. Used where
/// several series must share one truncation.
pub fn direct_series_sharp(form: &FormDescriptor, s: Complex64, kind: SeriesKind, cutoff: usize) -> Result<EvalResult> {
    check(s, cutoff)?;
    let a = series_coefficients(form, kind, cutoff)?;
    let mut v = Complex64::new(0.0, 0.0);
    let mut mag = 0.0;
    for (n, an) in a.iter().enumerate().take(cutoff + 1).skip(1) {
        let t = an * (-s * (n as f64).ln()).exp();
        v += t;
        mag += t.norm();
    }
    let nf = cutoff as f64;
    let tail = match kind {
        SeriesKind::L | SeriesKind::LAdditive(_) => divisor_tail(s.re, nf),
        // |c(n)| ≤ 2 d(n)² log² n, bounded crudely through an extra log
        _ => 2.0 * nf.ln().powi(3) * divisor_tail(s.re, nf),
    };
    Ok(EvalResult::new(v, tail + 4.0 * f64::EPSILON * mag, Method::DirectSeries))
}
