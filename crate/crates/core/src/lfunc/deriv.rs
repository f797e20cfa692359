use super::afe::{afe_parts, check_envelope, default_eta, default_x, AfeOptions, SLACK};
use super::{gamma_factor, root_number, EvalResult, Method};
use crate::forms::FormDescriptor;
use crate::special::{cauchy_derivatives, digamma, trigamma};
use crate::{Complex64, Error, Result};
use rayon::prelude::*;
use std::f64::consts::PI;

pub const DERIV_RADIUS: f64 = 0.05;
/// Minimum distance to a zero for Δ-type evaluations.
pub const ZERO_GUARD: f64 = 1e-3;
const NODES: usize = 32;

/// Λ and its first two derivatives at a point, with error estimates.
#[derive(Debug, Clone, Copy)]
pub struct Jet {
    pub values: [Complex64; 3],
    pub errors: [f64; 3],
}

/// Λ on the circle s + r·e^{2πi(j+θ)/n}, with X and the contour pinned.
pub(crate) fn lambda_on_circle(
    form: &FormDescriptor,
    center: Complex64,
    radius: f64,
    n: usize,
    rotation: f64,
) -> Result<(Vec<Complex64>, f64)> {
    let eps = root_number(form)?;
    let opts = AfeOptions {
        x: Some(default_x(form, Complex64::new(center.norm() + radius, 0.0))),
        eta: Some(default_eta(center.re + radius)),
    };
    let vals: Vec<Result<(Complex64, f64)>> = (0..n)
        .into_par_iter()
        .map(|j| {
            let z = center + Complex64::from_polar(radius, 2.0 * PI * (j as f64 + rotation) / n as f64);
            let p = afe_parts(form, z, opts)?;
            let g = gamma_factor(form, z)?;
            Ok((g * (p.b + eps * p.bstar), g.norm() * (p.err_b + p.err_bstar)))
        })
        .collect();
    let mut out = Vec::with_capacity(n);
    let mut err = 0.0f64;
    for v in vals {
        let (z, e) = v?;
        out.push(z);
        err = err.max(e);
    }
    Ok((out, err))
}

/// Λ, Λ′, Λ″ by the trapezoid rule on a circle of radius 0.05 with 32
/// nodes; the error combines the 16-node discrepancy and the node errors.
pub fn lambda_jet(form: &FormDescriptor, s: Complex64) -> Result<Jet> {
    check_envelope(s, SLACK - DERIV_RADIUS)?;
    let (vals, node_err) = lambda_on_circle(form, s, DERIV_RADIUS, NODES, 0.0)?;
    let full = cauchy_derivatives(&vals, DERIV_RADIUS, 3);
    let half: Vec<Complex64> = vals.iter().step_by(2).copied().collect();
    let coarse = cauchy_derivatives(&half, DERIV_RADIUS, 3);
    let mut errors = [0.0; 3];
    let mut fact = 1.0;
    for k in 0..3 {
        if k > 0 {
            fact *= k as f64;
        }
        errors[k] = (full[k] - coarse[k]).norm() + node_err * fact / DERIV_RADIUS.powi(k as i32);
    }
    Ok(Jet { values: [full[0], full[1], full[2]], errors })
}

/// Λ^{(order)}(s), order 1 or 2.
pub fn lambda_derivative(form: &FormDescriptor, s: Complex64, order: usize) -> Result<EvalResult> {
    if !(1..=2).contains(&order) {
        return Err(Error::InvalidInput(format!("order {order} not in 1..=2")));
    }
    check_envelope(s, 0.0)?;
    let j = lambda_jet(form, s)?;
    Ok(EvalResult::new(j.values[order], j.errors[order], Method::Contour))
}

/// (L, L′, L″) from the Λ jet, unwinding Γ_C(s+(k−1)/2):
/// L′ = (Λ′ − φΛ)/G, L″ = (Λ″ − 2φΛ′ + (φ² − ψ′)Λ)/G with φ = ψ − log 2π.
pub fn l_jet(form: &FormDescriptor, s: Complex64) -> Result<[EvalResult; 3]> {
    let j = lambda_jet(form, s)?;
    let w = s + (form.weight() as f64 - 1.0) / 2.0;
    let g = gamma_factor(form, s)?;
    let phi = digamma(w)? - (2.0 * PI).ln();
    let tri = trigamma(w)?;
    let [l0, l1, l2] = j.values;
    let [e0, e1, e2] = j.errors;
    let gn = g.norm();
    let v = [
        l0 / g,
        (l1 - phi * l0) / g,
        (l2 - 2.0 * phi * l1 + (phi * phi - tri) * l0) / g,
    ];
    let e = [
        e0 / gn,
        (e1 + phi.norm() * e0) / gn,
        (e2 + 2.0 * phi.norm() * e1 + (phi * phi - tri).norm() * e0) / gn,
    ];
    Ok([0, 1, 2].map(|i| EvalResult::new(v[i], e[i], Method::Afe)))
}

/// |Λ/Λ′|, a first-order estimate of the distance to the nearest zero.
pub fn nearest_zero_estimate(jet: &Jet) -> f64 {
    let d = jet.values[0].norm() / jet.values[1].norm();
    if d.is_finite() {
        d
    } else {
        f64::INFINITY
    }
}

/// Δ_f(s) = Λ″ − Λ′²/Λ − ψ′(s+(k−1)/2)Λ, refused within ZERO_GUARD of a zero.
pub fn delta_value(form: &FormDescriptor, s: Complex64) -> Result<EvalResult> {
    let j = lambda_jet(form, s)?;
    delta_from_jet(form, s, &j)
}

pub(crate) fn delta_from_jet(form: &FormDescriptor, s: Complex64, j: &Jet) -> Result<EvalResult> {
    let dist = nearest_zero_estimate(j);
    if dist < ZERO_GUARD {
        return Err(Error::NearZero { distance: dist, guard: ZERO_GUARD });
    }
    let tri = trigamma(s + (form.weight() as f64 - 1.0) / 2.0)?;
    let [l0, l1, l2] = j.values;
    let [e0, e1, e2] = j.errors;
    let r = l1 / l0;
    let value = l2 - l1 * r - tri * l0;
    let error = e2 + 2.0 * r.norm() * e1 + (r.norm_sqr() + tri.norm()) * e0;
    Ok(EvalResult::new(value, error, Method::Contour))
}
