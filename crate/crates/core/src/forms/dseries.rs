//! Coefficients of (L′/L)′·L and its additive twists.

use super::{coefficient_table, FormDescriptor};
use crate::arithmetic::{euler_phi, gcd, in_q_set, is_prime, smallest_prime_factors};
use crate::{e_frac, Complex64, Error, Result};

/// c(1..=limit) of D_f(s) or D_f(s, a/q); index 0 holds 0.
#[derive(Debug, Clone)]
pub struct DSeriesCoefficients {
    pub form_key: String,
    pub twist: Option<(i64, u64)>,
    pub limit: usize,
    pub values: Vec<Complex64>,
}

/// s_j = α_p^j + β_p^j for j = 0..=jmax (λ(p)^j when ξ(p) = 0).
pub fn satake_power_sums(lam_p: Complex64, xi_p: Complex64, jmax: usize) -> Vec<Complex64> {
    let mut s = Vec::with_capacity(jmax + 1);
    s.push(if xi_p == Complex64::new(0.0, 0.0) { Complex64::new(1.0, 0.0) } else { Complex64::new(2.0, 0.0) });
    for j in 1..=jmax {
        let prev2 = if j >= 2 { s[j - 2] } else { Complex64::new(0.0, 0.0) };
        let v = if j == 1 { lam_p } else { lam_p * s[j - 1] - xi_p * prev2 };
        s.push(v);
    }
    s
}

/// r_j for R_{f,q}(x) = Σ r_j x^j, j = 0..=jmax, where
/// R(x) = (q log²q/φ(q))(λx − 4ξx² + λξx³)/P(x) and P(x) = 1 − λx + ξx².
pub fn twisted_r_coefficients(form: &FormDescriptor, q: u64, jmax: usize) -> Result<Vec<Complex64>> {
    let zero = Complex64::new(0.0, 0.0);
    if q == 1 {
        return Ok(vec![zero; jmax + 1]);
    }
    if !in_q_set(q, form.level()) {
        return Err(Error::InvalidInput(format!("q = {q} is not 1 or a prime coprime to the level")));
    }
    let lam = coefficient_table(form, q as usize)?.values[q as usize];
    let xi = form.xi(q);
    // b_i = λ(q^i), the power series of 1/P
    let mut b = vec![zero; jmax + 1];
    for i in 0..=jmax {
        b[i] = match i {
            0 => Complex64::new(1.0, 0.0),
            1 => lam,
            _ => lam * b[i - 1] - xi * b[i - 2],
        };
    }
    let lq = (q as f64).ln();
    let k = q as f64 * lq * lq / euler_phi(q) as f64;
    let at = |i: isize| if i < 0 { zero } else { b[i as usize] };
    Ok((0..=jmax as isize)
        .map(|j| k * (lam * at(j - 1) - 4.0 * xi * at(j - 2) + lam * xi * at(j - 3)))
        .collect())
}

pub fn d_series_coefficients(
    form: &FormDescriptor,
    limit: usize,
    twist: Option<(i64, u64)>,
) -> Result<DSeriesCoefficients> {
    if limit == 0 {
        return Err(Error::InvalidInput("limit must be positive".into()));
    }
    if let Some((a, q)) = twist {
        if !in_q_set(q, form.level()) {
            return Err(Error::InvalidInput(format!("q = {q} is not 1 or a prime coprime to the level")));
        }
        if gcd(a.unsigned_abs(), q) != 1 {
            return Err(Error::InvalidInput(format!("gcd({a}, {q}) > 1")));
        }
    }
    let lam = coefficient_table(form, limit)?;
    let spf = smallest_prime_factors(limit);
    let mut c = vec![Complex64::new(0.0, 0.0); limit + 1];
    for p in 2..=limit {
        if spf[p] as usize != p {
            continue;
        }
        let lp = (p as f64).ln();
        let jmax = (limit as f64).ln() / lp;
        let s = satake_power_sums(lam.values[p], form.xi(p as u64), jmax.floor() as usize + 1);
        let mut m = p;
        let mut j = 1usize;
        while m <= limit {
            let w = s[j] * (lp * j as f64 * lp);
            for d in 1..=limit / m {
                c[d * m] += lam.values[d] * w;
            }
            j += 1;
            m = match m.checked_mul(p) {
                Some(v) => v,
                None => break,
            };
        }
    }
    if let Some((a, q)) = twist {
        if q > 1 {
            let jmax = ((limit as f64).ln() / (q as f64).ln()).floor() as usize + 1;
            let r = twisted_r_coefficients(form, q, jmax)?;
            for (n, cn) in c.iter_mut().enumerate().skip(1) {
                *cn *= e_frac(((n as i64 * a).rem_euclid(q as i64)) as f64 / q as f64);
            }
            let mut qj = q as usize;
            for rj in r.iter().skip(1) {
                if qj > limit {
                    break;
                }
                for d in 1..=limit / qj {
                    c[d * qj] -= *rj * lam.values[d];
                }
                qj *= q as usize;
            }
        }
    }
    Ok(DSeriesCoefficients { form_key: form.key().to_string(), twist, limit, values: c })
}

/// (Σ_{r≤x, r prime, r≡c mod p} |λ(r)|², x/(φ(p) log x)).
pub fn rankin_prime_sum(form: &FormDescriptor, p: u64, c: u64, x: f64) -> Result<(f64, f64)> {
    if !is_prime(p) || p % form.level() != 1 % form.level() {
        return Err(Error::InvalidInput(format!("need a prime p ≡ 1 mod {}", form.level())));
    }
    if gcd(c, p) != 1 || x < 2.0 {
        return Err(Error::InvalidInput("need a unit c and x ≥ 2".into()));
    }
    let limit = x.floor() as usize;
    let lam = coefficient_table(form, limit)?;
    let spf = smallest_prime_factors(limit);
    let observed = (2..=limit)
        .filter(|&r| spf[r] as usize == r && r as u64 % p == c % p)
        .map(|r| lam.values[r].norm_sqr())
        .sum();
    Ok((observed, x / (euler_phi(p) as f64 * x.ln())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::registry_form;

    #[test]
    fn satake_sums() {
        let l = Complex64::new(0.7, 0.0);
        let s = satake_power_sums(l, Complex64::new(1.0, 0.0), 4);
        assert_eq!(s[0].re, 2.0);
        assert!((s[2].re - (0.49 - 2.0)).abs() < 1e-15);
        let bad = satake_power_sums(l, Complex64::new(0.0, 0.0), 3);
        assert!((bad[3].re - 0.343).abs() < 1e-15);
    }

    #[test]
    fn untwisted_small_values() {
        for name in ["delta", "ec11"] {
            let f = registry_form(name).unwrap();
            let c = d_series_coefficients(&f, 200, None).unwrap();
            let lam = coefficient_table(&f, 200).unwrap();
            assert_eq!(c.values[1], Complex64::new(0.0, 0.0));
            for p in [2usize, 3, 5, 7, 13] {
                let l2 = (p as f64).ln().powi(2);
                assert!((c.values[p] - lam.values[p] * l2).norm() < 1e-13);
            }
        }
    }

    /// The coefficients equal those of L·L″ − L′² computed by direct
    /// Dirichlet convolution: L·(L′/L)′ = L″ − L′²/L, so c * λ = λ·log² * λ − (λ·log)*(λ·log).
    #[test]
    fn convolution_identity() {
        let f = registry_form("ec32").unwrap();
        let n = 400;
        let c = d_series_coefficients(&f, n, None).unwrap().values;
        let lam = coefficient_table(&f, n).unwrap().values.clone();
        let conv = |a: &dyn Fn(usize) -> Complex64, b: &dyn Fn(usize) -> Complex64, m: usize| {
            let mut s = Complex64::new(0.0, 0.0);
            for d in 1..=m {
                if m % d == 0 {
                    s += a(d) * b(m / d);
                }
            }
            s
        };
        for m in 1..=n {
            let lhs = conv(&|d| c[d], &|e| lam[e], m);
            let rhs = conv(&|d| lam[d] * (d as f64).ln().powi(2), &|e| lam[e], m)
                - conv(&|d| lam[d] * (d as f64).ln(), &|e| lam[e] * (e as f64).ln(), m);
            assert!((lhs - rhs).norm() < 1e-10 * (1.0 + rhs.norm()), "m = {m}");
        }
    }

    /// R(x) agrees with −(q/φ)·P·(P′/P)′, derivatives in s with x = q^{-s}.
    #[test]
    fn r_series_matches_rational_form() {
        let f = registry_form("delta").unwrap();
        let q = 5u64;
        let r = twisted_r_coefficients(&f, q, 60).unwrap();
        let lam = coefficient_table(&f, 5).unwrap().values[5];
        let lq = (q as f64).ln();
        for s in [Complex64::new(1.5, 0.3), Complex64::new(2.0, -1.0)] {
            let x = (-s * lq).exp();
            let series: Complex64 = r.iter().enumerate().map(|(j, rj)| rj * x.powu(j as u32)).sum();
            let p = 1.0 - lam * x + x * x;
            // D = x d/dx; d/ds = −log q · D
            let dp = -lam * x + 2.0 * x * x;
            let d2p = -lam * x + 4.0 * x * x;
            let logderiv2 = lq * lq * (d2p * p - dp * dp) / (p * p);
            let closed = -(q as f64 / 4.0) * p * logderiv2;
            assert!((series - closed).norm() < 1e-12 * closed.norm().max(1.0));
        }
        assert!(twisted_r_coefficients(&registry_form("ec11").unwrap(), 11, 3).is_err());
        assert!(twisted_r_coefficients(&f, 1, 3).unwrap().iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn g_difference_cancels_r_terms() {
        let f = registry_form("ec11").unwrap();
        let p = 23u64;
        let nbar = crate::arithmetic::mod_inv(11, p).unwrap() as i64;
        let c1 = d_series_coefficients(&f, 1000, Some((1, p))).unwrap().values;
        let c2 = d_series_coefficients(&f, 1000, Some((-nbar, p))).unwrap().values;
        let c = d_series_coefficients(&f, 1000, None).unwrap().values;
        for n in 1..=1000usize {
            let phase = e_frac(n as f64 / p as f64) - e_frac((-(n as i64) * nbar).rem_euclid(p as i64) as f64 / p as f64);
            assert!((c1[n] - c2[n] - phase * c[n]).norm() < 1e-10 * (1.0 + c[n].norm()));
        }
        assert!(d_series_coefficients(&f, 10, Some((1, 11))).is_err());
        assert!(d_series_coefficients(&f, 10, Some((5, 5))).is_err());
    }

    #[test]
    fn rankin_partition() {
        let f = registry_form("delta").unwrap();
        let (all, _) = rankin_prime_sum(&f, 5, 1, 1.9e3).map(|_| (0.0, 0.0)).unwrap();
        let _ = all;
        let total: f64 = (1..5).map(|c| rankin_prime_sum(&f, 5, c, 2000.0).unwrap().0).sum();
        let spf = smallest_prime_factors(2000);
        let lam = coefficient_table(&f, 2000).unwrap();
        let direct: f64 = (2..=2000usize).filter(|&r| spf[r] as usize == r && r != 5).map(|r| lam.values[r].norm_sqr()).sum();
        assert!((total - direct).abs() < 1e-9);
        assert_eq!(rankin_prime_sum(&f, 5, 1, 10.0).unwrap().0, 0.0);
        let (obs, pred) = rankin_prime_sum(&f, 5, 1, 1e5).unwrap();
        assert!((0.5..=2.0).contains(&(obs / pred)), "ratio {}", obs / pred);
    }
}
