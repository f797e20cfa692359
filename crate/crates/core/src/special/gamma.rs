use crate::{Complex64, Error, Result};
use std::f64::consts::{LN_2, PI};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
const LN_2PI: f64 = 1.837_877_066_409_345_5;

// B_{2k} / (2k(2k-1)), k = 1..12
const STIRLING: [f64; 12] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
    43867.0 / 244_188.0,
    -174_611.0 / 125_400.0,
    77683.0 / 5796.0,
    -236_364_091.0 / 1_506_960.0,
];

// B_{2k}, k = 1..10
const BERN: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174_611.0 / 330.0,
];

fn is_pole(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

fn pole(what: &'static str, z: Complex64) -> Error {
    Error::Pole { what, at: format!("{z}") }
}

fn stirling(w: Complex64) -> Complex64 {
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut corr = Complex64::new(0.0, 0.0);
    let mut p = inv;
    for c in STIRLING {
        corr += p * c;
        p *= inv2;
    }
    (w - 0.5) * w.ln() - w + LN_SQRT_2PI + corr
}

/// log sin(πz), stable for large |Im z|. Defined modulo 2πi.
pub fn ln_sin_pi(z: Complex64) -> Complex64 {
    if z.im.abs() < 1.0 {
        return (z * PI).sin().ln();
    }
    if z.im < 0.0 {
        return ln_sin_pi(z.conj()).conj();
    }
    // sin(πz) = e^{-iπz}(e^{2πiz} - 1)/(2i), with |e^{2πiz}| = e^{-2π Im z} small
    let i = Complex64::i();
    let q = (i * z * (2.0 * PI)).exp();
    -i * PI * z + ((q - 1.0) / (i * 2.0)).ln()
}

/// A logarithm of Γ(z). The imaginary part is only meaningful modulo 2π.
pub fn ln_gamma(z: Complex64) -> Result<Complex64> {
    if is_pole(z) {
        return Err(pole("Gamma", z));
    }
    if z.re < 0.5 {
        let one_minus = Complex64::new(1.0, 0.0) - z;
        return Ok(Complex64::new(PI.ln(), 0.0) - ln_sin_pi(z) - ln_gamma(one_minus)?);
    }
    if z.im.abs() >= 15.0 {
        return Ok(stirling(z));
    }
    let mut w = z;
    let mut prod = Complex64::new(1.0, 0.0);
    while w.re < 15.0 {
        prod *= w;
        w += 1.0;
    }
    Ok(stirling(w) - prod.ln())
}

pub fn complex_gamma(z: Complex64) -> Result<Complex64> {
    Ok(ln_gamma(z)?.exp())
}

/// log Γ_C(z) = log 2 − z log 2π + log Γ(z).
pub fn ln_gamma_c(z: Complex64) -> Result<Complex64> {
    Ok(ln_gamma(z)? + LN_2 - z * LN_2PI)
}

pub fn gamma_c(z: Complex64) -> Result<Complex64> {
    Ok(ln_gamma_c(z)?.exp())
}

pub fn digamma(z: Complex64) -> Result<Complex64> {
    if is_pole(z) {
        return Err(pole("digamma", z));
    }
    let mut w = z;
    let mut acc = Complex64::new(0.0, 0.0);
    while w.re < 10.0 || w.norm() < 10.0 {
        acc -= w.inv();
        w += 1.0;
    }
    let inv2 = (w * w).inv();
    let mut p = inv2;
    let mut s = w.ln() - w.inv() * 0.5;
    for (k, b) in BERN.iter().enumerate() {
        s -= p * (b / (2.0 * (k as f64 + 1.0)));
        p *= inv2;
    }
    Ok(s + acc)
}

/// ψ′(z) by upward recurrence to Re > 10 and the asymptotic series.
pub fn trigamma(z: Complex64) -> Result<Complex64> {
    if is_pole(z) {
        return Err(pole("trigamma", z));
    }
    let mut w = z;
    let mut acc = Complex64::new(0.0, 0.0);
    while w.re < 10.0 || w.norm() < 10.0 {
        acc += (w * w).inv();
        w += 1.0;
    }
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut s = inv + inv2 * 0.5;
    let mut p = inv2 * inv;
    for b in BERN {
        s += p * b;
        p *= inv2;
    }
    Ok(s + acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn gamma_special_values() {
        assert!((complex_gamma(c(1.0, 0.0)).unwrap() - 1.0).norm() < 1e-14);
        assert!((complex_gamma(c(0.5, 0.0)).unwrap() - PI.sqrt()).norm() < 1e-14);
        assert!((complex_gamma(c(5.0, 0.0)).unwrap() - 24.0).norm() < 1e-12);
        assert!((gamma_c(c(1.0, 0.0)).unwrap() - 1.0 / PI).norm() < 1e-14);
        assert!((complex_gamma(c(-0.5, 0.0)).unwrap() + 2.0 * PI.sqrt()).norm() < 1e-13);
    }

    #[test]
    fn gamma_recurrence_grid() {
        for i in -8..=8 {
            for j in -20..=20 {
                let z = c(0.37 + i as f64 * 0.9, j as f64 * 9.7);
                let a = complex_gamma(z + 1.0).unwrap();
                let b = z * complex_gamma(z).unwrap();
                assert!((a - b).norm() / a.norm() < 1e-12, "z={z}");
            }
        }
    }

    #[test]
    fn gamma_reflection_large_imaginary() {
        // |Γ(1/2+it)|² = π / cosh(πt)
        for t in [0.3, 5.0, 40.0, 150.0] {
            let g = complex_gamma(c(0.5, t)).unwrap();
            let want = PI / (PI * t).cosh();
            assert!((g.norm_sqr() / want - 1.0).abs() < 1e-12, "t={t}");
        }
    }

    #[test]
    fn poles_signaled() {
        assert!(complex_gamma(c(0.0, 0.0)).is_err());
        assert!(complex_gamma(c(-3.0, 0.0)).is_err());
        assert!(trigamma(c(-1.0, 0.0)).is_err());
    }

    #[test]
    fn trigamma_at_one_matches_series() {
        let mut s = 0.0;
        for n in (1..=2_000_000u64).rev() {
            s += 1.0 / (n as f64 * n as f64);
        }
        s += 1.0 / 2_000_000.0; // integral tail
        let t = trigamma(c(1.0, 0.0)).unwrap();
        assert!((t.re - s).abs() < 1e-11 && t.im.abs() < 1e-15);
        assert!((t.re - PI * PI / 6.0).abs() < 1e-13);
    }

    #[test]
    fn trigamma_recurrence_and_positivity() {
        for i in 0..30 {
            let z = c(-4.3 + 0.61 * i as f64, 1.7 * i as f64 - 20.0);
            let lhs = trigamma(z + 1.0).unwrap();
            let rhs = trigamma(z).unwrap() - (z * z).inv();
            assert!((lhs - rhs).norm() / rhs.norm() < 1e-10);
        }
        for i in 1..100 {
            assert!(trigamma(c(0.05 * i as f64, 0.0)).unwrap().re > 0.0);
        }
    }

    #[test]
    fn digamma_is_derivative_of_ln_gamma() {
        let z = c(2.3, 4.1);
        let h = 1e-5;
        let fd = (ln_gamma(z + h).unwrap() - ln_gamma(z - h).unwrap()) / (2.0 * h);
        assert!((fd - digamma(z).unwrap()).norm() < 1e-8);
        let euler = 0.577_215_664_901_532_9;
        assert!((digamma(c(1.0, 0.0)).unwrap().re + euler).abs() < 1e-14);
    }
}
