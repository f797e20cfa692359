use super::argument::{argument_count, winding_of, Rect};
use crate::forms::{registry::cache_dir, FormDescriptor};
use crate::lfunc::afe::check_envelope;
use crate::lfunc::deriv::lambda_on_circle;
use crate::lfunc::{afe_l, afe_lambda, lambda_derivative, lambda_jet, root_number, T_MAX};
use crate::special::trigamma;
use crate::{Complex64, Error, Result};
use rayon::prelude::*;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, OnceLock};

/// Radius of the disk on which multiplicity and residues are certified.
pub const CERT_RADIUS: f64 = 1e-2;
const TAYLOR_RADIUS: f64 = 0.04;
const TAYLOR_NODES: usize = 48;
const WINDING_NODES: usize = 128;
const RESIDUE_NODES: usize = 64;
pub const DEFAULT_SCAN_STEP: f64 = 0.1;
const SCAN_PAD: f64 = 0.05;

fn c(x: f64, y: f64) -> Complex64 {
    Complex64::new(x, y)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HardyValue {
    pub t: f64,
    pub value: f64,
    pub imag_residual: f64,
    pub error: f64,
}

/// ω·N^{it/2}, ω = ε^{−1/2}: the phase making Λ(1/2+it) real. Works for
/// every form since Λ_f̄(s̄) is the conjugate of Λ_f(s).
fn rotation(form: &FormDescriptor, t: f64) -> Result<Complex64> {
    let eps = root_number(form)?;
    Ok(Complex64::from_polar(1.0, 0.5 * t * (form.level() as f64).ln() - 0.5 * eps.arg()))
}

/// ε^{−1/2}N^{it/2}Λ(1/2+it), real up to rounding for any form.
pub fn rotated_z(form: &FormDescriptor, t: f64) -> Result<HardyValue> {
    let lam = afe_lambda(form, c(0.5, t))?;
    let z = rotation(form, t)? * lam.value;
    let imag = z.im.abs();
    if imag > 1e-8 * z.norm() + 100.0 * lam.error {
        return Err(Error::Numerical(format!("rotated Z at t = {t} has imaginary part {imag:.3e} of {:.3e}", z.norm())));
    }
    Ok(HardyValue { t, value: z.re, imag_residual: imag, error: lam.error })
}

/// Hardy's Z for self-dual forms with ε = ±1.
pub fn hardy_z(form: &FormDescriptor, t: f64) -> Result<HardyValue> {
    let eps = root_number(form)?;
    if !form.is_self_dual() || (eps.re.abs() - 1.0).abs() > 1e-8 {
        return Err(Error::InvalidInput(format!("{} is not self-dual with real root number", form.name())));
    }
    rotated_z(form, t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Detection {
    SignChange,
    BoxSearch,
    Mirror,
    Cache,
}

impl fmt::Display for Detection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Detection::SignChange => "sign-change",
            Detection::BoxSearch => "box-search",
            Detection::Mirror => "mirror",
            Detection::Cache => "cache",
        })
    }
}

/// A located zero with its certificate. `scale` is max|Λ| on the circle of
/// radius 0.04 about ρ; thresholds are taken relative to it.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroRecord {
    pub form_key: String,
    pub rho: Complex64,
    pub multiplicity: u32,
    pub derivative: Option<Complex64>,
    pub derivative_error: f64,
    /// Res Δ_f at ρ from a circle integral (simple zeros only).
    pub residue: Option<Complex64>,
    pub scale: f64,
    /// |Λ(ρ)| / scale.
    pub value_ratio: f64,
    pub radius: f64,
    pub detection: Detection,
}

impl ZeroRecord {
    /// |Λ′(ρ)|·r / max_{|s−ρ|=r}|Λ|, r = 0.04.
    pub fn normalized_derivative(&self) -> Option<f64> {
        self.derivative.map(|d| d.norm() * TAYLOR_RADIUS / self.scale)
    }

    /// |Res + Λ′| / |Λ′|.
    pub fn residue_mismatch(&self) -> Option<f64> {
        Some((self.residue? + self.derivative?).norm() / self.derivative?.norm())
    }

    fn mirrored(&self) -> ZeroRecord {
        ZeroRecord {
            rho: self.rho.conj(),
            derivative: self.derivative.map(|d| d.conj()),
            residue: self.residue.map(|d| d.conj()),
            detection: Detection::Mirror,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanReport {
    pub form_key: String,
    pub height: f64,
    /// Height of the audit rectangle, moved off any zero near ±T.
    pub audit_height: f64,
    pub zeros: Vec<ZeroRecord>,
    pub argument_total: i64,
    pub complete: bool,
    /// argument_total − Σ multiplicities.
    pub residual_count: i64,
}

impl ScanReport {
    pub fn zero_count(&self) -> i64 {
        self.zeros.iter().map(|z| z.multiplicity as i64).sum()
    }

    /// Restriction to |γ| ≤ t. Completeness carries over from the parent
    /// audit, which covers the smaller box.
    pub fn truncated(&self, t: f64) -> ScanReport {
        let zeros: Vec<ZeroRecord> = self.zeros.iter().filter(|z| z.rho.im.abs() <= t).cloned().collect();
        let found: i64 = zeros.iter().map(|z| z.multiplicity as i64).sum();
        ScanReport {
            form_key: self.form_key.clone(),
            height: t,
            audit_height: self.audit_height,
            argument_total: found + if self.complete { 0 } else { self.residual_count },
            complete: self.complete,
            residual_count: if self.complete { 0 } else { self.residual_count },
            zeros,
        }
    }
}

/// Taylor coefficients a_k from samples on a circle of radius r.
fn taylor_coefficients(samples: &[Complex64], r: f64) -> Vec<Complex64> {
    let n = samples.len();
    (0..n)
        .map(|k| {
            let s: Complex64 = samples
                .iter()
                .enumerate()
                .map(|(j, v)| v * Complex64::from_polar(1.0, -2.0 * PI * ((j * k) % n) as f64 / n as f64))
                .sum();
            s / (n as f64 * r.powi(k as i32))
        })
        .collect()
}

/// (p, p′, p″) at u.
fn poly_jet(a: &[Complex64], u: Complex64) -> [Complex64; 3] {
    let mut v = [Complex64::new(0.0, 0.0); 3];
    for k in (0..a.len()).rev() {
        v[2] = v[2] * u + 2.0 * v[1];
        v[1] = v[1] * u + v[0];
        v[0] = v[0] * u + a[k];
    }
    v
}

struct Local {
    coeffs: Vec<Complex64>,
    scale: f64,
}

fn local_data(form: &FormDescriptor, rho: Complex64) -> Result<Local> {
    let (samples, _) = lambda_on_circle(form, rho, TAYLOR_RADIUS, TAYLOR_NODES, 0.0)?;
    let scale = samples.iter().map(|v| v.norm()).fold(0.0, f64::max);
    Ok(Local { coeffs: taylor_coefficients(&samples, TAYLOR_RADIUS), scale })
}

fn multiplicity(l: &Local) -> i64 {
    let vals: Vec<Complex64> = (0..WINDING_NODES)
        .map(|j| poly_jet(&l.coeffs, Complex64::from_polar(CERT_RADIUS, 2.0 * PI * j as f64 / WINDING_NODES as f64))[0])
        .collect();
    winding_of(&vals).round() as i64
}

/// (1/2πi)∮ Δ_f on |s−ρ| = 0.01 with Δ = Λ″ − Λ′²/Λ − ψ′(s+κ)Λ.
fn residue_from(form: &FormDescriptor, rho: Complex64, l: &Local) -> Result<Complex64> {
    let kappa = (form.weight() as f64 - 1.0) / 2.0;
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..RESIDUE_NODES {
        let u = Complex64::from_polar(CERT_RADIUS, 2.0 * PI * (j as f64 + 0.5) / RESIDUE_NODES as f64);
        let [v0, v1, v2] = poly_jet(&l.coeffs, u);
        let d = v2 - v1 * v1 / v0 - trigamma(rho + u + kappa)? * v0;
        acc += d * u;
    }
    Ok(acc / RESIDUE_NODES as f64)
}

/// Multiplicity, Λ′ and the Δ residue at a candidate zero.
pub fn certify_zero(form: &FormDescriptor, rho: Complex64, detection: Detection) -> Result<ZeroRecord> {
    check_envelope(rho, 0.05)?;
    let l = local_data(form, rho)?;
    let value_ratio = l.coeffs[0].norm() / l.scale;
    if value_ratio > 1e-8 {
        return Err(Error::Numerical(format!("|Λ(ρ)|/scale = {value_ratio:.3e} at {rho}: not a zero")));
    }
    let m = multiplicity(&l);
    if m < 1 {
        return Err(Error::Numerical(format!("winding {m} about {rho}")));
    }
    let (derivative, derivative_error, residue) = if m == 1 {
        let d = lambda_derivative(form, rho, 1)?;
        (Some(d.value), d.error, Some(residue_from(form, rho, &l)?))
    } else {
        (None, 0.0, None)
    };
    Ok(ZeroRecord {
        form_key: form.key().to_string(),
        rho,
        multiplicity: m as u32,
        derivative,
        derivative_error,
        residue,
        scale: l.scale,
        value_ratio,
        radius: CERT_RADIUS,
        detection,
    })
}

/// Res_{s=ρ} Δ_f(s) by a circle integral about a simple zero.
pub fn residue_at_zero(form: &FormDescriptor, zero: &ZeroRecord) -> Result<Complex64> {
    if zero.multiplicity != 1 {
        return Err(Error::InvalidInput(format!("zero at {} has multiplicity {}", zero.rho, zero.multiplicity)));
    }
    let l = local_data(form, zero.rho)?;
    residue_from(form, zero.rho, &l)
}

fn brent<F: Fn(f64) -> Result<f64>>(f: F, mut a: f64, mut b: f64, mut fa: f64, mut fb: f64, tol: f64) -> Result<f64> {
    if fa.abs() < fb.abs() {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut fa, &mut fb);
    }
    let (mut cc, mut fc) = (a, fa);
    let mut bisected = true;
    let mut d = 0.0;
    for _ in 0..100 {
        if fb == 0.0 || (b - a).abs() < tol {
            return Ok(b);
        }
        let mut s = if fa != fc && fb != fc {
            a * fb * fc / ((fa - fb) * (fa - fc)) + b * fa * fc / ((fb - fa) * (fb - fc)) + cc * fa * fb / ((fc - fa) * (fc - fb))
        } else {
            b - fb * (b - a) / (fb - fa)
        };
        let lo = (3.0 * a + b) / 4.0;
        let out = !((s > lo.min(b)) && (s < lo.max(b)));
        if out
            || (bisected && (s - b).abs() >= (b - cc).abs() / 2.0)
            || (!bisected && (s - b).abs() >= (cc - d).abs() / 2.0)
            || (bisected && (b - cc).abs() < tol)
            || (!bisected && (cc - d).abs() < tol)
        {
            s = 0.5 * (a + b);
            bisected = true;
        } else {
            bisected = false;
        }
        let fs = f(s)?;
        d = cc;
        cc = b;
        fc = fb;
        if fa * fs < 0.0 {
            b = s;
            fb = fs;
        } else {
            a = s;
            fa = fs;
        }
        if fa.abs() < fb.abs() {
            std::mem::swap(&mut a, &mut b);
            std::mem::swap(&mut fa, &mut fb);
        }
    }
    Ok(b)
}

/// Newton on Λ from a seed, using the contour jet.
fn newton(form: &FormDescriptor, mut s: Complex64) -> Result<Complex64> {
    for _ in 0..40 {
        let j = lambda_jet(form, s)?;
        let step = j.values[0] / j.values[1];
        s -= step;
        if step.norm() < 1e-12 {
            return Ok(s);
        }
        if step.norm() > 0.5 {
            break;
        }
    }
    Err(Error::Numerical(format!("Newton did not converge near {s}")))
}

/// Minimum-modulus seeding of |L| on a 0.05 grid inside the strip box,
/// followed by Newton refinement.
fn box_search(form: &FormDescriptor, t0: f64, t1: f64, known: &[Complex64]) -> Result<Vec<Complex64>> {
    let h = 0.05;
    let sig: Vec<f64> = (1..20).map(|j| j as f64 * h).collect();
    let ts: Vec<f64> = (0..=((t1 - t0) / h).ceil() as usize).map(|j| (t0 + j as f64 * h).min(t1)).collect();
    let pts: Vec<(usize, usize)> = (0..sig.len()).flat_map(|i| (0..ts.len()).map(move |j| (i, j))).collect();
    let vals: Vec<f64> = pts
        .par_iter()
        .map(|&(i, j)| afe_l(form, c(sig[i], ts[j])).map(|v| v.value.norm()).unwrap_or(f64::INFINITY))
        .collect();
    let at = |i: usize, j: usize| vals[i * ts.len() + j];
    let mut seeds = Vec::new();
    for i in 0..sig.len() {
        for j in 0..ts.len() {
            let v = at(i, j);
            let mut is_min = true;
            for (di, dj) in [(-1i64, 0i64), (1, 0), (0, -1), (0, 1)] {
                let (ni, nj) = (i as i64 + di, j as i64 + dj);
                if ni >= 0 && nj >= 0 && (ni as usize) < sig.len() && (nj as usize) < ts.len() && at(ni as usize, nj as usize) < v {
                    is_min = false;
                }
            }
            if is_min {
                seeds.push((v, c(sig[i], ts[j])));
            }
        }
    }
    seeds.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut found: Vec<Complex64> = Vec::new();
    for (_, s) in seeds.into_iter().take(12) {
        if let Ok(z) = newton(form, s) {
            let fresh = known.iter().chain(found.iter()).all(|k| (k - z).norm() > 1e-6);
            if fresh && z.re > 0.0 && z.re < 1.0 && z.im >= t0 && z.im <= t1 {
                found.push(z);
            }
        }
    }
    Ok(found)
}

/// Sub-intervals of [t0, t1] where the argument count exceeds the zeros found.
fn deficient_intervals(form: &FormDescriptor, t0: f64, t1: f64, zeros: &[ZeroRecord], out: &mut Vec<(f64, f64)>) -> Result<()> {
    let ac = argument_count(form, Rect::strip(t0, t1))?;
    let (a, b) = (ac.rect.t0, ac.rect.t1);
    let found: i64 = zeros.iter().filter(|z| z.rho.im > a && z.rho.im < b).map(|z| z.multiplicity as i64).sum();
    if ac.count <= found {
        return Ok(());
    }
    if b - a <= 1.0 {
        out.push((a, b));
        return Ok(());
    }
    let mut mid = 0.5 * (a + b);
    while zeros.iter().any(|z| (z.rho.im - mid).abs() < 1e-3) {
        mid += 3e-3;
    }
    deficient_intervals(form, a, mid, zeros, out)?;
    deficient_intervals(form, mid, b, zeros, out)
}

fn audit_height(t: f64, zeros: &[ZeroRecord]) -> f64 {
    let clear = |h: f64| zeros.iter().all(|z| (z.rho.im.abs() - h).abs() > 1e-3);
    for k in 0..50 {
        for h in [t + 3e-3 * k as f64, t - 3e-3 * k as f64] {
            if h > 0.0 && h <= T_MAX && clear(h) {
                return h;
            }
        }
    }
    t
}

/// Sign changes of the rotated Z on a grid of the given step, refined by
/// Brent and certified on small disks; completeness is audited by the
/// argument count on [−0.1, 1.1] × [−T, T]. Any shortfall triggers a
/// localized minimum-modulus search for zeros off the line.
pub fn scan_zeros(form: &FormDescriptor, t_max: f64, step: f64) -> Result<ScanReport> {
    if !(step > 0.0 && step <= 0.25) {
        return Err(Error::InvalidInput(format!("step {step} must lie in (0, 0.25]")));
    }
    if !(t_max > 0.0 && t_max <= T_MAX) {
        return Err(Error::InvalidInput(format!("height {t_max} must lie in (0, {T_MAX}]")));
    }
    let eps = root_number(form)?;
    let mirror = form.is_self_dual();
    let hi = (t_max + SCAN_PAD).min(T_MAX);
    let lo = if mirror { 0.0 } else { -hi };
    let n = ((hi - lo) / step).ceil() as usize;
    let ts: Vec<f64> = (0..=n).map(|j| (lo + j as f64 * step).min(hi)).collect();
    let zs: Vec<Result<f64>> = ts.par_iter().map(|&t| rotated_z(form, t).map(|h| h.value)).collect();
    let zs = zs.into_iter().collect::<Result<Vec<f64>>>()?;

    let zf = |t: f64| rotated_z(form, t).map(|h| h.value);
    let mut gammas = Vec::new();
    if mirror && (eps.re + 1.0).abs() < 1e-8 {
        gammas.push(0.0);
    }
    for j in 0..n {
        if zs[j] == 0.0 && !(mirror && j == 0) {
            gammas.push(ts[j]);
        } else if zs[j] * zs[j + 1] < 0.0 {
            gammas.push(brent(zf, ts[j], ts[j + 1], zs[j], zs[j + 1], 1e-13)?);
        }
    }
    let mut zeros = Vec::new();
    for g in gammas {
        let z = certify_zero(form, c(0.5, g), Detection::SignChange)?;
        if mirror && g > 0.0 {
            zeros.push(z.mirrored());
        }
        zeros.push(z);
    }

    let mut t_a = audit_height(t_max, &zeros);
    let mut total = argument_count(form, Rect::strip(-t_a, t_a))?;
    for _ in 0..2 {
        t_a = total.rect.t1;
        let found: i64 = zeros.iter().filter(|z| z.rho.im.abs() < t_a).map(|z| z.multiplicity as i64).sum();
        if total.count <= found {
            break;
        }
        let mut gaps = Vec::new();
        deficient_intervals(form, -t_a, t_a, &zeros, &mut gaps)?;
        let known: Vec<Complex64> = zeros.iter().map(|z| z.rho).collect();
        for (a, b) in gaps {
            for rho in box_search(form, a, b, &known)? {
                if let Ok(z) = certify_zero(form, rho, Detection::BoxSearch) {
                    zeros.push(z);
                }
            }
        }
        t_a = audit_height(t_max, &zeros);
        total = argument_count(form, Rect::strip(-t_a, t_a))?;
    }
    t_a = total.rect.t1;
    zeros.retain(|z| z.rho.im.abs() < t_a);
    zeros.sort_by(|a, b| a.rho.im.total_cmp(&b.rho.im).then(a.rho.re.total_cmp(&b.rho.re)));
    let found: i64 = zeros.iter().map(|z| z.multiplicity as i64).sum();
    Ok(ScanReport {
        form_key: form.key().to_string(),
        height: t_max,
        audit_height: t_a,
        zeros,
        argument_total: total.count,
        complete: total.count == found,
        residual_count: total.count - found,
    })
}

fn memo() -> &'static Mutex<HashMap<String, Arc<ScanReport>>> {
    static M: OnceLock<Mutex<HashMap<String, Arc<ScanReport>>>> = OnceLock::new();
    M.get_or_init(Default::default)
}

/// scan_zeros at the default step, reusing any in-memory or on-disk scan
/// of the same form to at least the requested height.
pub fn scan_cached(form: &FormDescriptor, t_max: f64) -> Result<ScanReport> {
    if let Some(r) = memo().lock().unwrap().get(form.key()).filter(|r| r.height >= t_max) {
        return Ok(r.truncated(t_max));
    }
    let path = cache_dir().map(|d| zero_cache_path(&d, form, t_max));
    let report = match path.as_ref().and_then(|p| read_zero_cache(p).ok()) {
        Some(r) if r.form_key == form.key() && r.height >= t_max => r,
        _ => {
            let r = scan_zeros(form, t_max, DEFAULT_SCAN_STEP)?;
            if let Some(p) = &path {
                // the cache is an optimisation; a failed write keeps the result
                let _ = write_zero_cache(p, &r);
            }
            r
        }
    };
    let mut m = memo().lock().unwrap();
    let keep = m.get(form.key()).map_or(true, |old| old.height < report.height);
    if keep {
        m.insert(form.key().to_string(), Arc::new(report.clone()));
    }
    Ok(report.truncated(t_max))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ZeroCount {
    pub value: u64,
    /// False when the underlying scan failed its audit.
    pub complete: bool,
}

/// N(β, T): zeros with Re ≥ β and |Im| ≤ T, with multiplicity.
pub fn count_ng(report: &ScanReport, beta: f64, t: f64) -> ZeroCount {
    let value = report
        .zeros
        .iter()
        .filter(|z| z.rho.re >= beta && z.rho.im.abs() <= t)
        .map(|z| z.multiplicity as u64)
        .sum();
    ZeroCount { value, complete: report.complete && t <= report.audit_height }
}

/// N^s(T): certified simple zeros with |Im| ≤ T.
pub fn count_nfs(report: &ScanReport, t: f64) -> ZeroCount {
    let value = report.zeros.iter().filter(|z| z.multiplicity == 1 && z.rho.im.abs() <= t).count() as u64;
    ZeroCount { value, complete: report.complete && t <= report.audit_height }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaObserved {
    pub value: f64,
    /// True when no simple zero exceeded 1/2.
    pub floor: bool,
}

/// max(1/2, max β over simple zeros). Zeros of f̄ are the conjugates of
/// those of f, so one scan covers both.
pub fn theta_observed(report: &ScanReport) -> ThetaObserved {
    let m = report.zeros.iter().filter(|z| z.multiplicity == 1).map(|z| z.rho.re).fold(f64::NEG_INFINITY, f64::max);
    if m > 0.5 + 1e-9 {
        ThetaObserved { value: m, floor: false }
    } else {
        ThetaObserved { value: 0.5, floor: true }
    }
}

pub fn zero_cache_path(dir: &Path, form: &FormDescriptor, t: f64) -> PathBuf {
    let key = form.key();
    let mut safe: String = key.chars().map(|c| if c.is_ascii_alphanumeric() { c } else { '_' }).collect();
    if safe.len() > 64 {
        // FNV-1a keeps long twist keys unique without hitting NAME_MAX
        let h = key.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3));
        safe.truncate(48);
        safe.push_str(&format!("_{h:016x}"));
    }
    dir.join("zeros").join(format!("{safe}_T{t}.txt"))
}

/// One header line, then per zero: form, β, γ, multiplicity, Re Λ′, Im Λ′, radius.
pub fn write_zero_cache(path: &Path, report: &ScanReport) -> Result<()> {
    if let Some(d) = path.parent() {
        std::fs::create_dir_all(d)?;
    }
    let mut out = format!(
        "# form={} height={} audit_height={} argument_total={} complete={}\n",
        report.form_key, report.height, report.audit_height, report.argument_total, report.complete
    );
    for z in &report.zeros {
        let d = z.derivative.unwrap_or_default();
        out.push_str(&format!(
            "{} {:.17e} {:.17e} {} {:.17e} {:.17e} {}\n",
            z.form_key, z.rho.re, z.rho.im, z.multiplicity, d.re, d.im, z.radius
        ));
    }
    Ok(std::fs::write(path, out)?)
}

pub fn read_zero_cache(path: &Path) -> Result<ScanReport> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::Parse("empty zero cache".into()))?;
    let mut kv = HashMap::new();
    for part in header.trim_start_matches('#').split_whitespace() {
        if let Some((k, v)) = part.split_once('=') {
            kv.insert(k, v);
        }
    }
    let get = |k: &str| kv.get(k).copied().ok_or_else(|| Error::Parse(format!("zero cache header lacks {k}")));
    let num = |k: &str| -> Result<f64> { get(k)?.parse().map_err(|_| Error::Parse(format!("bad {k}"))) };
    let mut zeros = Vec::new();
    for line in lines.filter(|l| !l.trim().is_empty()) {
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 7 {
            return Err(Error::Parse(format!("zero cache line: {line}")));
        }
        let p = |i: usize| f[i].parse::<f64>().map_err(|_| Error::Parse(format!("zero cache field: {}", f[i])));
        let mult: u32 = f[3].parse().map_err(|_| Error::Parse(format!("multiplicity: {}", f[3])))?;
        zeros.push(ZeroRecord {
            form_key: f[0].to_string(),
            rho: c(p(1)?, p(2)?),
            multiplicity: mult,
            derivative: (mult == 1).then(|| c(p(4).unwrap_or(0.0), p(5).unwrap_or(0.0))),
            derivative_error: 0.0,
            residue: None,
            scale: f64::NAN,
            value_ratio: f64::NAN,
            radius: p(6)?,
            detection: Detection::Cache,
        });
    }
    let found: i64 = zeros.iter().map(|z| z.multiplicity as i64).sum();
    let total: i64 = get("argument_total")?.parse().map_err(|_| Error::Parse("argument_total".into()))?;
    Ok(ScanReport {
        form_key: get("form")?.to_string(),
        height: num("height")?,
        audit_height: num("audit_height")?,
        zeros,
        argument_total: total,
        complete: get("complete")? == "true",
        residual_count: total - found,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn taylor_of_polynomial() {
        let p = |u: Complex64| u * u * u - 2.0 * u + 0.5;
        let r = 0.04;
        let samples: Vec<Complex64> = (0..48).map(|j| p(Complex64::from_polar(r, 2.0 * PI * j as f64 / 48.0))).collect();
        let a = taylor_coefficients(&samples, r);
        assert!((a[0] - 0.5).norm() < 1e-13 && (a[1] + 2.0).norm() < 1e-12 && (a[3] - 1.0).norm() < 1e-9);
        let [v, d1, d2] = poly_jet(&a, c(0.01, 0.0));
        assert!((v - p(c(0.01, 0.0))).norm() < 1e-13);
        assert!((d1 - (3.0 * 1e-4 - 2.0)).norm() < 1e-11);
        assert!((d2 - 0.06).norm() < 1e-8);
    }

    #[test]
    fn brent_finds_cosine_root() {
        let r = brent(|x| Ok(x.cos()), 1.0, 2.0, 1f64.cos(), 2f64.cos(), 1e-14).unwrap();
        assert!((r - PI / 2.0).abs() < 1e-13);
    }

    #[test]
    fn cache_round_trip() {
        let report = ScanReport {
            form_key: "x".into(),
            height: 5.0,
            audit_height: 5.003,
            zeros: vec![ZeroRecord {
                form_key: "x".into(),
                rho: c(0.5, 1.25),
                multiplicity: 1,
                derivative: Some(c(1e-5, -2e-6)),
                derivative_error: 0.0,
                residue: None,
                scale: 1.0,
                value_ratio: 0.0,
                radius: CERT_RADIUS,
                detection: Detection::SignChange,
            }],
            argument_total: 1,
            complete: true,
            residual_count: 0,
        };
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("z.txt");
        write_zero_cache(&p, &report).unwrap();
        let back = read_zero_cache(&p).unwrap();
        assert_eq!(back.zeros[0].rho, report.zeros[0].rho);
        assert_eq!(back.zeros[0].derivative, report.zeros[0].derivative);
        assert!(back.complete && back.argument_total == 1 && back.audit_height == 5.003);
    }
}
