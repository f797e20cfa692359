use crate::forms::FormDescriptor;
use crate::lfunc::{afe_lambda, T_MAX};
use crate::{Complex64, Error, Result};
use rayon::prelude::*;
use std::f64::consts::PI;

const BASE_STEP: f64 = 0.25;
const MAX_TURN: f64 = PI / 4.0;
const MAX_DEPTH: u32 = 20;
const PERTURB: f64 = 2e-3;

/// Axis-parallel rectangle [σ₀, σ₁] × [t₀, t₁].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub sigma0: f64,
    pub sigma1: f64,
    pub t0: f64,
    pub t1: f64,
}

impl Rect {
    pub fn new(sigma0: f64, sigma1: f64, t0: f64, t1: f64) -> Self {
        Rect { sigma0, sigma1, t0, t1 }
    }

    /// The strip audit box [−0.1, 1.1] × [t₀, t₁].
    pub fn strip(t0: f64, t1: f64) -> Self {
        Rect::new(-0.1, 1.1, t0, t1)
    }

    pub fn contains(&self, s: Complex64) -> bool {
        s.re > self.sigma0 && s.re < self.sigma1 && s.im > self.t0 && s.im < self.t1
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArgumentCount {
    pub count: i64,
    pub winding: f64,
    /// |winding − count|.
    pub residual: f64,
    /// The rectangle actually used, after any perturbation.
    pub rect: Rect,
    pub evaluations: usize,
}

/// Number of zeros of Λ inside `rect`, by tracking arg Λ around the
/// boundary. Consecutive samples are refined until the phase moves by
/// less than π/4; a boundary passing within reach of a zero forces the
/// horizontal edges outwards by 2e−3 and a retry.
pub fn argument_count(form: &FormDescriptor, rect: Rect) -> Result<ArgumentCount> {
    if !(rect.sigma0 < rect.sigma1 && rect.t0 < rect.t1) {
        return Err(Error::InvalidInput(format!("degenerate rectangle {rect:?}")));
    }
    let mut r = rect;
    for _ in 0..4 {
        match track(form, r) {
            Err(Error::NearZero { .. }) => {
                r.t1 = if r.t1 + PERTURB <= T_MAX { r.t1 + PERTURB } else { r.t1 - PERTURB };
                r.t0 = if r.t0 - PERTURB >= -T_MAX { r.t0 - PERTURB } else { r.t0 + PERTURB };
            }
            other => return other,
        }
    }
    Err(Error::Numerical(format!("no zero-free boundary near {rect:?}")))
}

fn eval(form: &FormDescriptor, s: Complex64) -> Result<Complex64> {
    let v = afe_lambda(form, s)?.value;
    if v == Complex64::new(0.0, 0.0) {
        return Err(Error::NearZero { distance: 0.0, guard: PERTURB });
    }
    Ok(v)
}

fn track(form: &FormDescriptor, r: Rect) -> Result<ArgumentCount> {
    let corners = [
        Complex64::new(r.sigma0, r.t0),
        Complex64::new(r.sigma1, r.t0),
        Complex64::new(r.sigma1, r.t1),
        Complex64::new(r.sigma0, r.t1),
    ];
    let mut total = 0.0;
    let mut evals = 0;
    for e in 0..4 {
        let (a, b) = (corners[e], corners[(e + 1) % 4]);
        let n = ((b - a).norm() / BASE_STEP).ceil().max(1.0) as usize;
        let pts: Vec<Complex64> = (0..=n).map(|j| a + (b - a) * (j as f64 / n as f64)).collect();
        let vals: Vec<Result<Complex64>> = pts.par_iter().map(|&s| eval(form, s)).collect();
        let vals = vals.into_iter().collect::<Result<Vec<_>>>()?;
        evals += vals.len();
        for j in 0..n {
            total += refine(form, pts[j], vals[j], pts[j + 1], vals[j + 1], 0, &mut evals)?;
        }
    }
    let winding = total / (2.0 * PI);
    let count = winding.round();
    Ok(ArgumentCount { count: count as i64, winding, residual: (winding - count).abs(), rect: r, evaluations: evals })
}

fn refine(
    form: &FormDescriptor,
    a: Complex64,
    fa: Complex64,
    b: Complex64,
    fb: Complex64,
    depth: u32,
    evals: &mut usize,
) -> Result<f64> {
    let d = (fb / fa).arg();
    if d.abs() <= MAX_TURN {
        return Ok(d);
    }
    if depth >= MAX_DEPTH {
        return Err(Error::NearZero { distance: (b - a).norm(), guard: PERTURB });
    }
    let m = 0.5 * (a + b);
    let fm = eval(form, m)?;
    *evals += 1;
    Ok(refine(form, a, fa, m, fm, depth + 1, evals)? + refine(form, m, fm, b, fb, depth + 1, evals)?)
}

/// Winding number of sampled values around a closed loop.
pub(crate) fn winding_of(samples: &[Complex64]) -> f64 {
    let n = samples.len();
    (0..n).map(|j| (samples[(j + 1) % n] / samples[j]).arg()).sum::<f64>() / (2.0 * PI)
}
