//! Evaluation of L_f, Λ_f, their derivatives and the twisted objects built
//! from them.

pub(crate) mod afe;
pub(crate) mod deriv;
mod local;
mod root;
mod series;
mod twists;
mod vandermonde;

pub use afe::{default_eta, default_x, AfeOptions, AfeParams, SIGMA_MAX, SIGMA_MIN, T_MAX};
pub use deriv::{
    delta_value, l_jet, lambda_derivative, lambda_jet, nearest_zero_estimate, Jet, DERIV_RADIUS, ZERO_GUARD,
};
pub use local::{local_factor, LocalFactorData};
pub use root::{ln_gamma_factor_ratio, root_number};
pub use series::{direct_series, direct_series_sharp, SeriesKind, DEFAULT_SERIES_CUTOFF, SERIES_SIGMA_FLOOR};
pub use twists::{
    additive_twist_lambda, delta_aq_functional_equation_residual, delta_aq_value, dual_numerator, g_value, h_value, h_value_expanded, level_one_closed_form, multiplicative_twist_values,
    twist_distinctness, DistinctnessReport,
};
pub use vandermonde::vandermonde_weights;

use crate::forms::FormDescriptor;
use crate::special::ln_gamma_c;
use crate::{Complex64, Result};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    DirectSeries,
    Afe,
    CharacterExpansion,
    Contour,
    ZeroSum,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::DirectSeries => "direct series",
            Method::Afe => "AFE",
            Method::CharacterExpansion => "character expansion",
            Method::Contour => "contour",
            Method::ZeroSum => "zero sum",
        })
    }
}

/// A value with an error estimate and the method that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalResult {
    pub value: Complex64,
    pub error: f64,
    pub method: Method,
}

impl EvalResult {
    pub fn new(value: Complex64, error: f64, method: Method) -> Self {
        EvalResult { value, error, method }
    }

    /// |a − b| ≤ err_a + err_b.
    pub fn agrees_with(&self, other: &EvalResult) -> bool {
        (self.value - other.value).norm() <= self.error + other.error
    }
}

/// Γ_C(s + (k−1)/2).
pub fn gamma_factor(form: &FormDescriptor, s: Complex64) -> Result<Complex64> {
    Ok(ln_gamma_c(s + (form.weight() as f64 - 1.0) / 2.0)?.exp())
}

/// Λ_f(s) = Γ_C(s+(k−1)/2)(B(s) + εB*(s)).
pub fn afe_lambda(form: &FormDescriptor, s: Complex64) -> Result<EvalResult> {
    afe::check_envelope(s, 0.0)?;
    Ok(afe_lambda_with(form, s, AfeOptions::default())?.0)
}

/// Λ_f(s) with pinned cutoffs; also returns the cutoffs used.
pub fn afe_lambda_with(form: &FormDescriptor, s: Complex64, opts: AfeOptions) -> Result<(EvalResult, AfeParams)> {
    let eps = root_number(form)?;
    let p = afe::afe_parts(form, s, opts)?;
    let g = gamma_factor(form, s)?;
    let l = p.b + eps * p.bstar;
    let err = g.norm() * (p.err_b + p.err_bstar + 4.0 * f64::EPSILON * l.norm());
    Ok((EvalResult::new(g * l, err, Method::Afe), p.params))
}

/// L_f(s) through the AFE.
pub fn afe_l(form: &FormDescriptor, s: Complex64) -> Result<EvalResult> {
    afe::check_envelope(s, 0.0)?;
    let eps = root_number(form)?;
    let p = afe::afe_parts(form, s, AfeOptions::default())?;
    Ok(EvalResult::new(p.b + eps * p.bstar, p.err_b + p.err_bstar, Method::Afe))
}

/// |Λ(s) − εC^{1/2−s}Λ_f̄(1−s)| / max(|Λ(s)|, 1).
pub fn functional_equation_residual(form: &FormDescriptor, s: Complex64) -> Result<f64> {
    let eps = root_number(form)?;
    let lhs = afe_lambda(form, s)?.value;
    let rhs = afe_lambda(&form.dual(), Complex64::new(1.0, 0.0) - s)?.value;
    let c = form.level() as f64;
    let factor = ((Complex64::new(0.5, 0.0) - s) * c.ln()).exp() * eps;
    Ok((lhs - factor * rhs).norm() / lhs.norm().max(1.0))
}
