use crate::arithmetic::{euler_phi, in_q_set};
use crate::forms::{lambda, FormDescriptor};
use crate::{Complex64, Error, Result};
use std::f64::consts::TAU;

/// P_{f,q}(x) = 1 − λ(q)x + ξ(q)x², R_{f,q}, and the Satake data at q.
#[derive(Debug, Clone)]
pub struct LocalFactorData {
    pub form_key: String,
    pub q: u64,
    pub lambda_q: Complex64,
    pub xi_q: Complex64,
    pub alpha: Complex64,
    pub beta: Complex64,
    /// arg α in [0, 2π)
    pub theta: f64,
    /// max relative deviation of R from −(q/φ)P(P′/P)′ at the sample points
    pub relation_residual: f64,
}

impl LocalFactorData {
    pub fn p(&self, x: Complex64) -> Complex64 {
        if self.q == 1 {
            return Complex64::new(1.0, 0.0);
        }
        1.0 - self.lambda_q * x + self.xi_q * x * x
    }

    /// q log²q/φ(q) · x(λ − 4ξx + λξx²)/P(x)
    pub fn r(&self, x: Complex64) -> Complex64 {
        if self.q == 1 {
            return Complex64::new(0.0, 0.0);
        }
        let (l, xi) = (self.lambda_q, self.xi_q);
        let lq = (self.q as f64).ln();
        let k = self.q as f64 * lq * lq / euler_phi(self.q) as f64;
        k * x * (l - 4.0 * xi * x + l * xi * x * x) / self.p(x)
    }

    /// −(q/φ(q))·P·(P′/P)′ at x = q^{-s}, derivatives in s.
    pub fn r_from_p(&self, s: Complex64) -> Complex64 {
        if self.q == 1 {
            return Complex64::new(0.0, 0.0);
        }
        let lq = (self.q as f64).ln();
        let x = (-s * lq).exp();
        let (l, xi) = (self.lambda_q, self.xi_q);
        let p = self.p(x);
        // with D = x d/dx, d/ds = −log q·D
        let dp = -l * x + 2.0 * xi * x * x;
        let ddp = -l * x + 4.0 * xi * x * x;
        let second = lq * lq * (ddp * p - dp * dp) / (p * p);
        -(self.q as f64 / euler_phi(self.q) as f64) * p * second
    }

    /// Closed form of Res_{s = iθ/log q} R(q^{-s}) = (q log q/φ(q))·(α − β)/α.
    pub fn r_residue(&self) -> Complex64 {
        let lq = (self.q as f64).ln();
        self.q as f64 * lq / euler_phi(self.q) as f64 * (self.alpha - self.beta) / self.alpha
    }
}

pub fn local_factor(form: &FormDescriptor, q: u64) -> Result<LocalFactorData> {
    if q == 1 {
        return Ok(LocalFactorData {
            form_key: form.key().into(),
            q,
            lambda_q: Complex64::new(0.0, 0.0),
            xi_q: Complex64::new(0.0, 0.0),
            alpha: Complex64::new(0.0, 0.0),
            beta: Complex64::new(0.0, 0.0),
            theta: 0.0,
            relation_residual: 0.0,
        });
    }
    if !in_q_set(q, form.level()) {
        return Err(Error::InvalidInput(format!("q = {q} must be 1 or a prime not dividing {}", form.level())));
    }
    let l = lambda(form, q)?;
    let xi = form.xi(q);
    let disc = (l * l - 4.0 * xi).sqrt();
    // the root with nonnegative imaginary part first when both are unimodular
    let (mut alpha, mut beta) = ((l + disc) / 2.0, (l - disc) / 2.0);
    if alpha.im < beta.im {
        std::mem::swap(&mut alpha, &mut beta);
    }
    let theta = alpha.arg().rem_euclid(TAU);
    let mut data = LocalFactorData {
        form_key: form.key().into(),
        q,
        lambda_q: l,
        xi_q: xi,
        alpha,
        beta,
        theta,
        relation_residual: 0.0,
    };
    let samples = [(1.5, 0.0), (2.0, 1.0), (1.3, -2.2), (0.7, 4.0), (3.0, 0.5)];
    let lq = (q as f64).ln();
    let mut worst = 0.0f64;
    for (x, y) in samples {
        let s = Complex64::new(x, y);
        let a = data.r((-s * lq).exp());
        let b = data.r_from_p(s);
        worst = worst.max((a - b).norm() / b.norm().max(1.0));
    }
    data.relation_residual = worst;
    if worst > 1e-10 {
        return Err(Error::Numerical(format!("R/P relation residual {worst:.3e} at q = {q}")));
    }
    Ok(data)
}
