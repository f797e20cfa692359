use super::afe::{afe_parts, AfeOptions};
use crate::forms::FormDescriptor;
use crate::special::ln_gamma;
use crate::{Complex64, Error, Result};

const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// The first probe solves for ε; the rest cross-check.
const PROBES: [(f64, f64); 5] = [(1.3, 0.7), (1.7, -0.4), (1.1, 1.9), (1.45, 3.1), (0.8, -2.3)];

/// log of C^{1/2−s}γ_k(s), the factor with L_f(s) = (this)·L_f̄(1−s).
pub fn ln_gamma_factor_ratio(form: &FormDescriptor, s: Complex64) -> Result<Complex64> {
    let kappa = (form.weight() as f64 - 1.0) / 2.0;
    let one = Complex64::new(1.0, 0.0);
    let lg = (2.0 * s - 1.0) * LN_2PI + ln_gamma(one - s + kappa)? - ln_gamma(s + kappa)?;
    Ok((Complex64::new(0.5, 0.0) - s) * (form.level() as f64).ln() + lg)
}

/// ε from B + εB* = εK(B′ + ε̄B*′) with B′, B*′ taken for f̄ at 1−s₀:
/// ε(B* − KB′) = KB*′ − B, linear since |ε| = 1.
fn solve_at(form: &FormDescriptor, s0: Complex64) -> Result<Option<Complex64>> {
    let one = Complex64::new(1.0, 0.0);
    let a = afe_parts(form, s0, AfeOptions::default())?;
    let d = afe_parts(&form.dual(), one - s0, AfeOptions::default())?;
    let k = ln_gamma_factor_ratio(form, s0)?.exp();
    let den = a.bstar - k * d.b;
    let num = k * d.bstar - a.b;
    if den.norm() < 1e-6 * (a.bstar.norm() + (k * d.b).norm()) {
        return Ok(None);
    }
    Ok(Some(num / den))
}

/// Root number, computed once per form and cached on the descriptor.
pub fn root_number(form: &FormDescriptor) -> Result<Complex64> {
    if let Some(e) = form.cached_root_number() {
        return Ok(e);
    }
    let mut sols = Vec::new();
    for (x, y) in PROBES {
        if let Some(e) = solve_at(form, Complex64::new(x, y))? {
            sols.push(e);
            if sols.len() == 3 {
                break;
            }
        }
    }
    if sols.len() < 3 {
        return Err(Error::Numerical(format!("root number of {} degenerate at all probes", form.name())));
    }
    let eps = sols[0];
    if (eps.norm() - 1.0).abs() > 1e-8 || sols.iter().any(|e| (e - eps).norm() > 1e-8) {
        return Err(Error::Numerical(format!("root number probes of {} disagree: {sols:?}", form.name())));
    }
    let eps = form.store_root_number(eps);
    let dual = form.dual();
    if dual != *form {
        dual.store_root_number(eps.conj());
    }
    Ok(eps)
}
