//! Smoothed approximate functional equation.
//!
//! L(s) = B(s) + εB*(s) with
//!   B(s)  = Σ λ(n) n^{-s} g(n/X),
//!   B*(s) = Σ λ̄(m) m^{s-1} h(Xm),
//!   h(y)  = (1/2π)∫ Φ(c+iv) y^{-c-iv} dv,  Φ(u) = C^{1/2-s+u} γ_k(s-u) ĝ(u),
//! where γ_k(z) = (2π)^{2z-1} Γ(1-z+(k-1)/2)/Γ(z+(k-1)/2) and C is the level.
//! The h integral is a trapezoid sum on a fixed grid, so Σ_m reduces to a
//! polynomial in e^{-i·step·log(Xm)} evaluated by Horner's rule.

use crate::forms::{coefficient_table, FormDescriptor, DEFAULT_COEFF_CAP};
use crate::special::{kernel, ln_gamma};
use crate::{Complex64, Error, Result};
use rayon::prelude::*;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, OnceLock, RwLock};

pub const SIGMA_MIN: f64 = -1.0;
pub const SIGMA_MAX: f64 = 3.0;
pub const T_MAX: f64 = 60.0;
/// Slack allowed around the envelope for contour nodes.
pub(crate) const SLACK: f64 = 0.1;

const STEP: f64 = 0.1;
const V_MAX: f64 = 48.0;
const BOUND_STEP: f64 = 0.5;
const BOUND_ABSCISSAE: [f64; 6] = [4.0, 6.0, 8.0, 12.0, 16.0, 24.0];
const CHUNK: usize = 4096;
const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// Cutoffs used for one evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AfeParams {
    pub x: f64,
    /// Nominal dual cutoff from XY ≥ C|s_k|² log⁴(C|s_k|²); the dual sum is
    /// actually carried to `m_terms`, past which terms are provably negligible.
    pub y: f64,
    pub eta: f64,
    pub n_terms: usize,
    pub m_terms: usize,
    pub conductor: f64,
    pub truncation_error: f64,
}

/// Pinned choices, used to keep X and the contour fixed across a circle.
#[derive(Debug, Clone, Copy, Default)]
pub struct AfeOptions {
    pub x: Option<f64>,
    pub eta: Option<f64>,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct AfeParts {
    pub b: Complex64,
    pub bstar: Complex64,
    pub err_b: f64,
    pub err_bstar: f64,
    pub params: AfeParams,
}

pub(crate) fn check_envelope(s: Complex64, slack: f64) -> Result<()> {
    if s.re < SIGMA_MIN - slack || s.re > SIGMA_MAX + slack || s.im.abs() > T_MAX + slack || !s.re.is_finite() {
        return Err(Error::OutOfEnvelope(format!("{s}")));
    }
    Ok(())
}

pub fn default_eta(sigma: f64) -> f64 {
    if sigma <= 1.0 {
        1.25
    } else {
        1.25 + (sigma - 1.0).ceil()
    }
}

/// √C·(|s|+k), rounded up to the ladder 2^{j/8} so g tables are shared.
pub fn default_x(form: &FormDescriptor, s: Complex64) -> f64 {
    let raw = (form.level() as f64).sqrt() * (s.norm() + form.weight() as f64);
    2f64.powf((8.0 * raw.log2()).ceil() / 8.0)
}

type NodeKey = (u64, u64, u64);

fn ghat_cache() -> &'static RwLock<HashMap<NodeKey, Arc<Vec<Complex64>>>> {
    static C: OnceLock<RwLock<HashMap<NodeKey, Arc<Vec<Complex64>>>>> = OnceLock::new();
    C.get_or_init(Default::default)
}

/// ĝ(c + i(−V + j·step)) for j = 0..=2V/step.
fn ghat_nodes(c: f64, step: f64, vmax: f64) -> Arc<Vec<Complex64>> {
    let key = (c.to_bits(), step.to_bits(), vmax.to_bits());
    if let Some(v) = ghat_cache().read().unwrap().get(&key) {
        return v.clone();
    }
    let half = (vmax / step).round() as usize;
    let upper: Vec<Complex64> = (0..=half)
        .into_par_iter()
        .map(|j| kernel().g_hat(Complex64::new(c, j as f64 * step)).expect("c > 0"))
        .collect();
    let mut all = Vec::with_capacity(2 * half + 1);
    all.extend(upper[1..].iter().rev().map(|z| z.conj()));
    all.extend_from_slice(&upper);
    let v = Arc::new(all);
    ghat_cache().write().unwrap().insert(key, v.clone());
    v
}

fn g_cache() -> &'static RwLock<HashMap<u64, Arc<Vec<f64>>>> {
    static C: OnceLock<RwLock<HashMap<u64, Arc<Vec<f64>>>>> = OnceLock::new();
    C.get_or_init(Default::default)
}

pub(crate) fn g_table(x: f64, n_max: usize) -> Arc<Vec<f64>> {
    if let Some(t) = g_cache().read().unwrap().get(&x.to_bits()).filter(|t| t.len() > n_max) {
        return t.clone();
    }
    let t = Arc::new(kernel().g_table(x, n_max + n_max / 4));
    g_cache().write().unwrap().insert(x.to_bits(), t.clone());
    t
}

/// log Φ at u = c + iv without the ĝ factor; None where 1/Γ(z+κ) vanishes.
fn ln_phi(ln_c: f64, kappa: f64, s: Complex64, u: Complex64) -> Result<Option<Complex64>> {
    let z = s - u;
    let num = ln_gamma(Complex64::new(1.0, 0.0) - z + kappa)?;
    let den = match ln_gamma(z + kappa) {
        Ok(v) => v,
        Err(_) => return Ok(None),
    };
    Ok(Some((Complex64::new(0.5, 0.0) - s + u) * ln_c + (2.0 * z - 1.0) * LN_2PI + num - den))
}

/// Φ at u = c + iv; zero where 1/Γ(z+κ) vanishes.
fn phi(ln_c: f64, kappa: f64, s: Complex64, u: Complex64, ghat: Complex64) -> Result<Complex64> {
    Ok(ln_phi(ln_c, kappa, s, u)?.map_or(Complex64::new(0.0, 0.0), |l| l.exp() * ghat))
}

/// Σ_{m>M} d(m) m^{-a} ≤ a M^{1−a}[(log M + 1)/(a−1) + 1/(a−1)²], a > 1.
pub(crate) fn divisor_tail(a: f64, m: f64) -> f64 {
    let m = m.max(1.0);
    a * m.powf(1.0 - a) * ((m.ln() + 1.0) / (a - 1.0) + 1.0 / ((a - 1.0) * (a - 1.0)))
}

fn ln_divisor_tail(a: f64, m: f64) -> f64 {
    let m = m.max(1.0);
    a.ln() + (1.0 - a) * m.ln() + ((m.ln() + 1.0) / (a - 1.0) + 1.0 / ((a - 1.0) * (a - 1.0))).ln()
}

/// log of an upper bound for (1/2π)∫|Φ| on Re u = c, from a coarse grid
/// with a safety factor. Kept in logs since C^c overflows for large c.
fn ln_phi_mass(ln_c: f64, kappa: f64, s: Complex64, c: f64) -> f64 {
    let vmax = V_MAX + 2.0 * c;
    let nodes = ghat_nodes(c, BOUND_STEP, vmax);
    let mut logs = Vec::with_capacity(nodes.len());
    for (j, g) in nodes.iter().enumerate() {
        let u = Complex64::new(c, -vmax + j as f64 * BOUND_STEP);
        match ln_phi(ln_c, kappa, s, u) {
            Ok(Some(l)) if g.norm() > 0.0 => logs.push(l.re + g.norm().ln()),
            Ok(_) => {}
            Err(_) => return f64::INFINITY,
        }
    }
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !top.is_finite() {
        return top;
    }
    let sum: f64 = logs.iter().map(|l| (l - top).exp()).sum();
    top + (2.0 * sum * BOUND_STEP / (2.0 * PI)).ln()
}

/// Smallest M with mass·X^{-c}·T_{c+1−σ}(M) ≤ tol, if below `cap`.
fn truncation_point(ln_mass: f64, x: f64, c: f64, sigma: f64, tol: f64, cap: usize) -> Option<usize> {
    let a = c + 1.0 - sigma;
    if !(a > 1.0) || !ln_mass.is_finite() {
        return None;
    }
    let ln_pre = ln_mass - c * x.ln();
    let ln_tol = tol.ln();
    let ok = |m: usize| ln_pre + ln_divisor_tail(a, m as f64) <= ln_tol;
    if ln_pre + (1.0 + divisor_tail(a, 1.0)).ln() <= ln_tol {
        return Some(0);
    }
    let mut hi = 1usize;
    while !ok(hi) {
        hi *= 2;
        if hi > cap {
            return None;
        }
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if ok(mid) {
            hi = mid
        } else {
            lo = mid
        }
    }
    Some(hi)
}

fn ordered_sum<F: Fn(usize) -> (Complex64, f64) + Sync>(lo: usize, hi: usize, f: F) -> (Complex64, f64) {
    if hi < lo {
        return (Complex64::new(0.0, 0.0), 0.0);
    }
    let chunks: Vec<(usize, usize)> = (lo..=hi).step_by(CHUNK).map(|a| (a, (a + CHUNK - 1).min(hi))).collect();
    let parts: Vec<(Complex64, f64)> = chunks
        .par_iter()
        .map(|&(a, b)| {
            let mut s = Complex64::new(0.0, 0.0);
            let mut m = 0.0;
            for n in a..=b {
                let (v, w) = f(n);
                s += v;
                m += w;
            }
            (s, m)
        })
        .collect();
    parts.iter().fold((Complex64::new(0.0, 0.0), 0.0), |(s, m), (a, b)| (s + a, m + b))
}

/// Σ_j φ_j e^{−i·j·STEP·x} by Horner's rule.
fn trig_sum(phis: &[Complex64], x: f64) -> Complex64 {
    let w = Complex64::from_polar(1.0, -STEP * x);
    phis.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, p| acc * w + p)
}

const CHEB_NODES: usize = 24;
const CHEB_RHO: f64 = 10.0;

/// Piecewise Chebyshev interpolant of the trig sum in x = log(Xm) for large
/// m, where consecutive nodes crowd together. The sum is demodulated to
/// frequencies in [−W, W] and each panel has half-width 1/W.
struct Panels {
    m0: usize,
    x0: f64,
    half: f64,
    omega: f64,
    coeffs: Vec<[Complex64; CHEB_NODES]>,
    /// Interpolation error relative to Σ|φ_j|, from the Bernstein-ellipse bound.
    error: f64,
}

impl Panels {
    fn build(phis: &[Complex64], ln_x: f64, m_max: usize) -> Option<Panels> {
        let w = (phis.len().saturating_sub(1)) as f64 * STEP / 2.0;
        let half = (1.0 / w.max(1e-9)).min(0.5);
        let m0 = (CHEB_NODES as f64 / half).ceil() as usize;
        if m_max <= 2 * m0 {
            return None;
        }
        let x0 = ln_x + (m0 as f64).ln();
        let x1 = ln_x + (m_max as f64).ln();
        let count = ((x1 - x0) / (2.0 * half)).floor() as usize + 1;
        let nodes: Vec<f64> = (0..CHEB_NODES).map(|i| (PI * (i as f64 + 0.5) / CHEB_NODES as f64).cos()).collect();
        let coeffs = (0..count)
            .into_par_iter()
            .map(|k| {
                let mid = x0 + (2 * k + 1) as f64 * half;
                let vals: Vec<Complex64> = nodes
                    .iter()
                    .map(|t| {
                        let x = mid + half * t;
                        trig_sum(phis, x) * Complex64::from_polar(1.0, w * x)
                    })
                    .collect();
                let mut c = [Complex64::new(0.0, 0.0); CHEB_NODES];
                for (j, cj) in c.iter_mut().enumerate() {
                    let sum: Complex64 = vals
                        .iter()
                        .enumerate()
                        .map(|(i, v)| v * (PI * (j * (2 * i + 1)) as f64 / (2 * CHEB_NODES) as f64).cos())
                        .sum();
                    *cj = sum * (2.0 / CHEB_NODES as f64);
                }
                c[0] *= 0.5;
                c
            })
            .collect();
        let error = 2.0 * (w * half * (CHEB_RHO - 1.0 / CHEB_RHO) / 2.0).exp() / (CHEB_RHO - 1.0)
            * CHEB_RHO.powi(-(CHEB_NODES as i32));
        Some(Panels { m0, x0, half, omega: w, coeffs, error })
    }

    fn eval(&self, x: f64) -> Complex64 {
        let k = (((x - self.x0) / (2.0 * self.half)).floor().max(0.0) as usize).min(self.coeffs.len() - 1);
        let t = (x - self.x0 - (2 * k + 1) as f64 * self.half) / self.half;
        let c = &self.coeffs[k];
        let (mut b1, mut b2) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        for cj in c[1..].iter().rev() {
            let b0 = cj + 2.0 * t * b1 - b2;
            b2 = b1;
            b1 = b0;
        }
        (c[0] + t * b1 - b2) * Complex64::from_polar(1.0, -self.omega * x)
    }
}

/// B and B* at s without the root number.
pub(crate) fn afe_parts(form: &FormDescriptor, s: Complex64, opts: AfeOptions) -> Result<AfeParts> {
    check_envelope(s, SLACK)?;
    let k = form.weight() as f64;
    let kappa = (k - 1.0) / 2.0;
    let cond = form.level() as f64;
    let ln_c = cond.ln();
    let sigma = s.re;
    let x = opts.x.unwrap_or_else(|| default_x(form, s));
    let eta = opts.eta.unwrap_or_else(|| default_eta(sigma));
    if !(eta > sigma && eta > sigma - (k + 1.0) / 2.0) {
        return Err(Error::InvalidInput(format!("contour Re u = {eta} must lie right of {sigma}")));
    }
    let sk = s.norm() + k;
    let q = cond * sk * sk;
    let y_nominal = q * q.ln().max(1.0).powi(4) / x;

    // B(s)
    let kg = kernel().kappa;
    let b_tail = |n: f64| {
        let grow = 1.0 - x * (-sigma).max(0.0) / n;
        kg * (n.ln() + 1.0) * n.powf(-sigma) * x * (-n / x).exp() / grow.max(1e-3)
    };
    let mut n_max = (40.0 * x).ceil();
    while b_tail(n_max) > 1e-18 {
        n_max *= 1.1;
    }
    let n_max = n_max as usize;
    if n_max > DEFAULT_COEFF_CAP {
        return Err(Error::CapExceeded { requested: n_max as u64, cap: DEFAULT_COEFF_CAP as u64 });
    }
    let gt = g_table(x, n_max);
    let table = coefficient_table(form, n_max)?;
    let lam = &table.values;
    let (b, b_abs) = ordered_sum(1, n_max, |n| {
        let w = lam[n] * gt[n];
        if w == Complex64::new(0.0, 0.0) {
            return (w, 0.0);
        }
        let t = w * (-s * (n as f64).ln()).exp();
        (t, t.norm())
    });
    let err_b = b_tail(n_max as f64) + 4.0 * f64::EPSILON * b_abs;

    // Φ on the trapezoid grid
    let gh = ghat_nodes(eta, STEP, V_MAX);
    let mut phis = Vec::with_capacity(gh.len());
    for (j, g) in gh.iter().enumerate() {
        let u = Complex64::new(eta, -V_MAX + j as f64 * STEP);
        phis.push(phi(ln_c, kappa, s, u, *g)?);
    }
    let peak = phis.iter().map(|p| p.norm()).fold(0.0, f64::max);
    let first = phis.iter().position(|p| p.norm() > 1e-24 * peak).unwrap_or(0);
    let last = phis.iter().rposition(|p| p.norm() > 1e-24 * peak).unwrap_or(0);
    let phis = &phis[first..=last];
    let v_lo = -V_MAX + first as f64 * STEP;
    let mass_eta = phis.iter().map(|p| p.norm()).sum::<f64>() * STEP / (2.0 * PI);

    // dual length
    let tol = 1e-17 * b.norm().max(1.0);
    let mut m_eff = truncation_point((mass_eta * 1.5).ln(), x, eta, sigma, tol, DEFAULT_COEFF_CAP);
    for &c in BOUND_ABSCISSAE.iter().filter(|&&c| c > eta) {
        let m = truncation_point(ln_phi_mass(ln_c, kappa, s, c), x, c, sigma, tol, DEFAULT_COEFF_CAP);
        m_eff = match (m_eff, m) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
    }
    let m_terms = m_eff.ok_or_else(|| {
        Error::OutOfEnvelope(format!("dual sum at {s} needs more than {DEFAULT_COEFF_CAP} terms"))
    })?;
    let table = if m_terms > n_max { coefficient_table(form, m_terms)? } else { table };
    let lam = &table.values;

    // d: half-width of the analyticity strip used by the trapezoid error estimate
    let d = 0.8 * eta.min(eta - sigma + 1.0 + kappa);
    let ln_x = x.ln();
    let mag: f64 = phis.iter().map(|p| p.norm()).sum();
    let panels = Panels::build(phis, ln_x, m_terms);
    let (bstar, extra) = ordered_sum(1, m_terms, |m| {
        let l = lam[m].conj();
        if l == Complex64::new(0.0, 0.0) {
            return (l, 0.0);
        }
        let ly = ln_x + (m as f64).ln();
        let (acc, interp) = match &panels {
            Some(p) if m >= p.m0 => (p.eval(ly), p.error * mag),
            _ => (trig_sum(phis, ly), 0.0),
        };
        let pre = (Complex64::new(-eta, -v_lo) * ly).exp() * (STEP / (2.0 * PI));
        let scale = ((s.re - 1.0) * (m as f64).ln()).exp();
        let term = l * Complex64::from_polar(scale, s.im * (m as f64).ln()) * pre * acc;
        let lm = l.norm() * scale * (-eta * ly).exp();
        let disc = lm * mass_eta * 2.0 * (-d * (2.0 * PI / STEP - ly)).exp();
        let round = (8.0 * f64::EPSILON * mag + interp) * lm * STEP / (2.0 * PI);
        (term, disc + round)
    });
    let tail = if m_terms == 0 { 0.0 } else { tol };
    let err_bstar = extra + tail;
    Ok(AfeParts {
        b,
        bstar,
        err_b,
        err_bstar,
        params: AfeParams {
            x,
            y: y_nominal.max(m_terms as f64),
            eta,
            n_terms: n_max,
            m_terms,
            conductor: cond,
            truncation_error: err_b + err_bstar,
        },
    })
}
