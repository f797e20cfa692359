use super::scan::{residue_at_zero, scan_cached, ZeroRecord};
use crate::arithmetic::{additive_expansion, gcd, in_q_set};
use crate::lfunc::dual_numerator;
use crate::forms::{d_series_coefficients, twist_form, FormDescriptor};
use crate::lfunc::afe::divisor_tail;
use crate::lfunc::{
    additive_twist_lambda, direct_series_sharp, gamma_factor, local_factor, root_number, EvalResult, Method, SeriesKind, T_MAX,
};
use crate::special::{adaptive, trigamma};
use crate::{e_frac, Complex64, Error, Result};
use num_rational::Rational64;
use std::f64::consts::PI;

/// The pieces of S = F − (reflected) + A − B at one point z.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExplicitFormulaTerms {
    pub zero_sum: Complex64,
    pub f_term: Complex64,
    pub reflected: Complex64,
    pub a_minus_b: Complex64,
    pub residual: f64,
    pub quadrature_error: f64,
    pub zeros_used: usize,
}

fn kappa(form: &FormDescriptor) -> f64 {
    (form.weight() as f64 - 1.0) / 2.0
}

fn check_z(z: Complex64) -> Result<Complex64> {
    if !(0.2..=2.0).contains(&z.im) || !(0.1..=2.0).contains(&z.re.abs()) {
        return Err(Error::InvalidInput(format!("z = {z} outside Im z ∈ [0.2, 2], |Re z| ∈ [0.1, 2]")));
    }
    let w = Complex64::new(0.0, -1.0) * z;
    if w.arg().abs() > PI / 2.0 - 0.05 {
        return Err(Error::InvalidInput(format!("arg(−iz) = {:.4} too close to the branch cut", w.arg())));
    }
    Ok(w)
}

/// 2Σ c_{f,a,q}(n) n^κ e(nz), summed until the term bound drops below 1e−20.
pub fn f_series(form: &FormDescriptor, a: i64, q: u64, z: Complex64) -> Result<Complex64> {
    if z.im <= 0.0 {
        return Err(Error::InvalidInput(format!("F needs Im z > 0, got {z}")));
    }
    let k = kappa(form);
    let bound = |n: f64| 2.0 * n.powf(k + 1.0) * (1.0 + n.ln()).powi(2) * (-2.0 * PI * n * z.im).exp();
    let peak = (k + 1.0) / (2.0 * PI * z.im);
    let mut limit = 2usize;
    while (limit as f64) < peak || bound(limit as f64) > 1e-20 {
        limit += 1 + limit / 8;
    }
    let c = d_series_coefficients(form, limit, Some((a, q)))?;
    let mut sum = Complex64::new(0.0, 0.0);
    for n in 1..=limit {
        let nf = n as f64;
        let phase = e_frac((nf * z.re).fract());
        sum += c.values[n] * nf.powf(k) * (-2.0 * PI * nf * z.im).exp() * phase;
    }
    Ok(2.0 * sum)
}

/// Λ_f(s, a/q) on the integration line.
fn twisted_lambda(form: &FormDescriptor, s: Complex64, a: i64, q: u64) -> Result<EvalResult> {
    if s.re < 2.0 {
        return additive_twist_lambda(form, s, a, q);
    }
    let mut m = 1000usize;
    while divisor_tail(s.re, m as f64) > 1e-18 {
        m = m * 3 / 2;
    }
    let r = direct_series_sharp(form, s, SeriesKind::LAdditive(Rational64::new(a, q as i64)), m)?;
    let g = gamma_factor(form, s)?;
    Ok(EvalResult::new(g * r.value, g.norm() * r.error, Method::DirectSeries))
}

/// A − B: (1/2πi)∫_{Re s = k/2} Λ_f(s,a/q)[ψ′(s+κ) + ψ′(s−κ) − π²/sin²(π(s+κ))](−iz)^{−s−κ} ds.
fn a_minus_b(form: &FormDescriptor, a: i64, q: u64, w: Complex64) -> Result<(Complex64, f64)> {
    let k = kappa(form);
    let sigma = form.weight() as f64 / 2.0;
    let lw = w.ln();
    let rate = PI / 2.0 - lw.im.abs();
    let env = |t: f64| (1.0 + t).powf(sigma + k) * (-rate * t).exp();
    let peak = env(((sigma + k) / rate - 1.0).max(0.0));
    let mut v = 10.0;
    while env(v) > 1e-18 * peak && v < 1e4 {
        v += 5.0;
    }
    let mut tail = 0.0;
    if sigma < 2.0 && v > T_MAX {
        tail = env(T_MAX) / peak;
        v = T_MAX;
    }
    let integrand = |t: f64| -> Result<Complex64> {
        let s = Complex64::new(sigma, t);
        let lam = twisted_lambda(form, s, a, q)?.value;
        let sn = (PI * (s + k)).sin();
        let kernel = trigamma(s + k)? + trigamma(s - k)? - PI * PI / (sn * sn);
        Ok(lam * kernel * (-(s + k) * lw).exp() / (2.0 * PI))
    };
    let failure = std::sync::Mutex::new(None);
    let g = |t: f64| match integrand(t) {
        Ok(v) => v,
        Err(e) => {
            failure.lock().unwrap().get_or_insert(e);
            Complex64::new(0.0, 0.0)
        }
    };
    let r = adaptive(&g, -v, v, (2.0 * v).ceil() as usize, 1e-22, 1e-13);
    if let Some(e) = failure.into_inner().unwrap() {
        return Err(e);
    }
    Ok((r.value, r.error + tail * r.value.norm()))
}

fn residue(form: &FormDescriptor, z: &ZeroRecord) -> Result<Complex64> {
    if z.multiplicity != 1 {
        return Err(Error::Numerical(format!(
            "zero at {} has multiplicity {}; the residue formula needs simple zeros",
            z.rho, z.multiplicity
        )));
    }
    match z.residue {
        Some(r) => Ok(r),
        None => residue_at_zero(form, z),
    }
}

/// Σ Res Δ_{f,a,q}·(−iz)^{−ρ−κ} over zeros with |γ| ≤ T, the poles of
/// Δ_{f,a,q} being those of Δ_f and of each Δ_{f⊗χ}.
fn zero_sum(form: &FormDescriptor, a: i64, q: u64, w: Complex64, t_trunc: f64) -> Result<(Complex64, usize)> {
    let k = kappa(form);
    let lw = w.ln();
    let mut sets: Vec<(FormDescriptor, Box<dyn Fn(Complex64) -> Complex64>)> = Vec::new();
    if q == 1 {
        sets.push((form.clone(), Box::new(|_| Complex64::new(1.0, 0.0))));
    } else {
        let (c0, terms) = additive_expansion(q)?;
        let lf = local_factor(form, q)?;
        let lq = (q as f64).ln();
        let w0 = terms[0].1 * terms[0].0.value(a);
        sets.push((form.clone(), Box::new(move |rho: Complex64| c0 + w0 * lf.p((-rho * lq).exp()))));
        for (chi, wt) in terms.iter().skip(1) {
            let coef = wt * chi.value(a);
            sets.push((twist_form(form, chi)?, Box::new(move |_| coef)));
        }
    }
    let mut total = Complex64::new(0.0, 0.0);
    let mut used = 0;
    for (g, weight) in &sets {
        let rep = scan_cached(g, t_trunc)?;
        if !rep.complete {
            return Err(Error::Numerical(format!("zero scan of {} to {t_trunc} is incomplete", g.name())));
        }
        for z in rep.zeros.iter().filter(|z| z.rho.im.abs() <= t_trunc) {
            total += weight(z.rho) * residue(g, z)? * (-(z.rho + k) * lw).exp();
            used += 1;
        }
    }
    Ok((total, used))
}

/// All pieces of the explicit formula for Δ_{f,a,q} at z, with zeros
/// truncated at |γ| ≤ T.
pub fn explicit_formula_terms(form: &FormDescriptor, a: i64, q: u64, z: Complex64, t_trunc: f64) -> Result<ExplicitFormulaTerms> {
    if !in_q_set(q, form.level()) || gcd(a.unsigned_abs(), q) != 1 {
        return Err(Error::InvalidInput(format!("(a, q) = ({a}, {q}) not admissible for level {}", form.level())));
    }
    let w = check_z(z)?;
    let n = form.level();
    let f_term = f_series(form, a, q, z)?;
    let b = dual_numerator(n, a, q);
    let zr = -1.0 / (z * (n * q * q) as f64);
    let pref = root_number(form)? * form.xi(q) / (Complex64::new(0.0, -1.0) * (n as f64).sqrt() * q as f64 * z).powi(form.weight() as i32);
    let reflected = pref * f_series(&form.dual(), b, q, zr)?;
    let (amb, quad_err) = a_minus_b(form, a, q, w)?;
    let (zero_sum, zeros_used) = zero_sum(form, a, q, w, t_trunc)?;
    let residual = (zero_sum - f_term + reflected - amb).norm();
    Ok(ExplicitFormulaTerms { zero_sum, f_term, reflected, a_minus_b: amb, residual, quadrature_error: quad_err, zeros_used })
}

/// |S − F + reflected − A + B|.
pub fn explicit_formula_residual(form: &FormDescriptor, a: i64, q: u64, z: Complex64, t_trunc: f64) -> Result<f64> {
    Ok(explicit_formula_terms(form, a, q, z, t_trunc)?.residual)
}

/// S_f(z) = Σ_{|γ|≤T} Res Δ_f(ρ)·(−iz)^{−ρ−κ}.
pub fn zero_sum_s(form: &FormDescriptor, z: Complex64, t_trunc: f64) -> Result<Complex64> {
    let w = Complex64::new(0.0, -1.0) * z;
    if w.re <= 0.0 {
        return Err(Error::InvalidInput(format!("S needs Im z > 0, got {z}")));
    }
    Ok(zero_sum(form, 1, 1, w, t_trunc)?.0)
}

/// ∫₀^{|α|/4} S_f(α+iy) y^{s+κ} dy/y with the zero sum truncated at T.
///
/// Near y = 0 the summands only decay like a power of γ, so the truncation
/// error dominates. It is estimated from the absolute contribution of the
/// zeros with |γ| in (T/2, T], scaled by the ratio of ∫_T^∞ and ∫_{T/2}^T of
/// log γ / γ², the profile of that contribution.
pub fn truncated_mellin_i(form: &FormDescriptor, alpha: f64, s: Complex64, t_trunc: f64) -> Result<EvalResult> {
    if s.re <= 0.0 || alpha == 0.0 || !alpha.is_finite() {
        return Err(Error::InvalidInput(format!("need Re s > 0 and α ≠ 0, got s = {s}, α = {alpha}")));
    }
    let k = kappa(form);
    let rep = scan_cached(form, t_trunc)?;
    let terms: Vec<(Complex64, Complex64, bool)> = rep
        .zeros
        .iter()
        .filter(|z| z.rho.im.abs() <= t_trunc)
        .map(|z| Ok((z.rho + k, residue(form, z)?, z.rho.im.abs() > t_trunc / 2.0)))
        .collect::<Result<_>>()?;
    let g = |y: f64| {
        if y <= 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let lw = Complex64::new(y, -alpha).ln();
        let sum: Complex64 = terms.iter().map(|(e, r, _)| r * (-e * lw).exp()).sum();
        sum * ((s + k - 1.0) * y.ln()).exp()
    };
    let band = |y: f64| {
        if y <= 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let lw = Complex64::new(y, -alpha).ln();
        let sum: f64 = terms.iter().filter(|t| t.2).map(|(e, r, _)| r.norm() * (-e * lw).exp().norm()).sum();
        Complex64::new(sum * ((s.re + k - 1.0) * y.ln()).exp(), 0.0)
    };
    let b = alpha.abs() / 4.0;
    let r = adaptive(&g, 0.0, b, 8, 1e-300, 1e-12);
    let tail = adaptive(&band, 0.0, b, 8, 1e-300, 1e-6);
    let lt = t_trunc.max(4.0).ln();
    let scale = (lt + 1.0) / (lt + 1.0 - 2.0 * std::f64::consts::LN_2);
    let truncation = tail.value.re.abs() * scale;
    Ok(EvalResult::new(r.value, r.error + truncation, Method::ZeroSum))
}
