use super::quad::adaptive;
use crate::{Complex64, Error, Result};
use std::f64::consts::FRAC_PI_2;
use std::sync::OnceLock;

/// The smoothing kernel g(x) = κ∫_x^∞ exp(−y−1/y) dy/y and its Mellin
/// transform ĝ. In the variable y = e^τ the integrand is exp(−2 cosh τ).
#[derive(Debug, Clone)]
pub struct SmoothingKernel {
    /// κ_g = 1/(2K₀(2)).
    pub kappa: f64,
}

static KERNEL: OnceLock<SmoothingKernel> = OnceLock::new();

pub fn kernel() -> &'static SmoothingKernel {
    KERNEL.get_or_init(|| SmoothingKernel { kappa: 0.5 / upper_tail(0.0) })
}

/// ∫_{τ0}^∞ exp(−2 cosh τ) dτ for τ0 ≥ 0.
fn upper_tail(t0: f64) -> f64 {
    debug_assert!(t0 >= 0.0);
    let end = (t0.cosh() + 380.0).acosh();
    let f = |t: f64| Complex64::new((-2.0 * t.cosh()).exp(), 0.0);
    adaptive(&f, t0, end, 8, 1e-300, 1e-15).value.re
}

impl SmoothingKernel {
    pub fn g(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 1.0;
        }
        let t = x.ln();
        if t >= 0.0 {
            self.kappa * upper_tail(t)
        } else {
            1.0 - self.kappa * upper_tail(-t)
        }
    }

    /// g(n/x) for n = 1..=n_max (index 0 holds g(0) = 1), by cumulative
    /// GK15 panels between consecutive nodes, summed from the top.
    pub fn g_table(&self, x: f64, n_max: usize) -> Vec<f64> {
        let mut out = vec![0.0; n_max + 1];
        out[0] = 1.0;
        if n_max == 0 {
            return out;
        }
        let f = |t: f64| Complex64::new((-2.0 * t.cosh()).exp(), 0.0);
        let top = (n_max as f64 / x).ln();
        let mut acc = if top >= 0.0 { upper_tail(top) } else { 1.0 / self.kappa - upper_tail(-top) };
        let mut comp = 0.0;
        out[n_max] = self.kappa * acc;
        for n in (1..n_max).rev() {
            let lo = (n as f64 / x).ln();
            let hi = ((n + 1) as f64 / x).ln();
            let (v, _) = super::quad::gk15(&f, lo, hi);
            // Kahan summation
            let y = v.re - comp;
            let s = acc + y;
            comp = (s - acc) - y;
            acc = s;
            out[n] = self.kappa * acc;
        }
        out
    }

    /// ĝ(z) = (κ/z)·∫_0^∞ exp(−y−1/y) y^{z−1} dy = 2κK_z(2)/z.
    pub fn g_hat(&self, z: Complex64) -> Result<Complex64> {
        if z.norm() < 1e-300 {
            return Err(Error::Pole { what: "g_hat", at: "0".into() });
        }
        Ok(bessel_moment(z) * self.kappa / z)
    }

    /// ∫_0^∞ g(x) x^{z−1} dx by plain quadrature, Re z > 0. Slow; used as an oracle.
    pub fn g_hat_direct(&self, z: Complex64) -> Complex64 {
        assert!(z.re > 0.0);
        let lo = -(40.0 / z.re);
        let f = |t: f64| (z * t).exp() * self.g(t.exp());
        adaptive(&f, lo, 4.5, 64, 1e-15, 1e-14).value
    }
}

/// ∫_{−∞}^{∞} exp(−2 cosh τ + zτ) dτ along Im τ = θ, chosen near the saddle so
/// that oscillation does not destroy the exponentially small result for large Im z.
fn bessel_moment(z: Complex64) -> Complex64 {
    // even in z
    let z = if z.re < 0.0 { -z } else { z };
    let (a, b) = (z.re, z.im);
    let cap = FRAC_PI_2 - 0.35;
    let theta = if b.abs() <= 2.0 { (b / 2.0).asin().clamp(-cap, cap) } else { cap * b.signum() };
    let ct = theta.cos();
    let m = |t: f64| -2.0 * ct * t.cosh() + a * t;
    let peak = (a / (2.0 * ct)).asinh();
    let mpeak = m(peak);
    let mut hi = peak + 0.5;
    while m(hi) > mpeak - 42.0 {
        hi += 0.25;
    }
    let mut lo = peak - 0.5;
    while m(lo) > mpeak - 42.0 {
        lo -= 0.25;
    }
    let i_theta = Complex64::new(0.0, theta);
    let phi = |t: f64| {
        let tau = Complex64::new(t, 0.0) + i_theta;
        (-2.0 * tau.cosh() + z * tau).exp()
    };
    let mut n = 64usize;
    let trap = |n: usize| {
        let h = (hi - lo) / n as f64;
        let mut s = Complex64::new(0.0, 0.0);
        let mut mag = 0.0;
        for j in 0..=n {
            let w = if j == 0 || j == n { 0.5 } else { 1.0 };
            let v = phi(lo + h * j as f64);
            s += v * w;
            mag += v.norm() * w;
        }
        (s * h, mag * h)
    };
    let (mut prev, _) = trap(n);
    loop {
        n *= 2;
        let (cur, mag) = trap(n);
        if (cur - prev).norm() <= 1e-15 * mag || n > 1 << 16 {
            return cur;
        }
        prev = cur;
    }
}
