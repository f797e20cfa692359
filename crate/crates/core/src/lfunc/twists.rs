use super::afe::SIGMA_MAX;
use super::deriv::{delta_value, l_jet};
use super::series::{direct_series, SeriesKind, DEFAULT_SERIES_CUTOFF, SERIES_SIGMA_FLOOR};
use super::{afe_lambda, gamma_factor, local_factor, root_number, EvalResult, Method};
use crate::arithmetic::{additive_expansion, gcd, in_q_set, is_prime, mod_inv, CharacterHandle};
use crate::forms::{coefficient_table, twist_form, FormDescriptor};
use crate::{e_frac, Complex64, Error, Result};
use crate::special::trigamma;
use num_rational::Rational64;

fn check_aq(form: &FormDescriptor, a: i64, q: u64) -> Result<()> {
    if !in_q_set(q, form.level()) {
        return Err(Error::InvalidInput(format!("q = {q} must be 1 or a prime not dividing {}", form.level())));
    }
    if gcd(a.unsigned_abs(), q) != 1 {
        return Err(Error::InvalidInput(format!("gcd({a}, {q}) > 1")));
    }
    Ok(())
}

fn combine(parts: &[(Complex64, EvalResult)], method: Method) -> EvalResult {
    let mut v = Complex64::new(0.0, 0.0);
    let mut e = 0.0;
    for (w, r) in parts {
        v += w * r.value;
        e += w.norm() * r.error;
    }
    EvalResult::new(v, e, method)
}

/// (L, L′, L″)(s, χ).
pub fn multiplicative_twist_values(form: &FormDescriptor, chi: &CharacterHandle, s: Complex64) -> Result<[EvalResult; 3]> {
    let q = chi.modulus();
    if q == 1 {
        return l_jet(form, s);
    }
    if chi.is_trivial() {
        // L(s, χ₀) = P(q^{-s}) L(s)
        let lf = local_factor(form, q)?;
        let lq = (q as f64).ln();
        let x = (-s * lq).exp();
        let (l, xi) = (lf.lambda_q, lf.xi_q);
        let p0 = lf.p(x);
        let p1 = lq * (l * x - 2.0 * xi * x * x);
        let p2 = -lq * lq * (l * x - 4.0 * xi * x * x);
        let [a0, a1, a2] = l_jet(form, s)?;
        let v = [p0 * a0.value, p1 * a0.value + p0 * a1.value, p2 * a0.value + 2.0 * p1 * a1.value + p0 * a2.value];
        let e = [
            p0.norm() * a0.error,
            p1.norm() * a0.error + p0.norm() * a1.error,
            p2.norm() * a0.error + 2.0 * p1.norm() * a1.error + p0.norm() * a2.error,
        ];
        return Ok([0, 1, 2].map(|i| EvalResult::new(v[i], e[i], Method::Afe)));
    }
    l_jet(&twist_form(form, chi)?, s)
}

/// Δ_{f,a,q}(s) = [(q−1)/φ + (q/φ)τ(χ₀)P(q^{-s})]Δ_f(s) + (1/φ)Σ_{χ≠χ₀} τ(χ̄)χ(a)Δ_{f⊗χ}(s).
pub fn delta_aq_value(form: &FormDescriptor, s: Complex64, a: i64, q: u64) -> Result<EvalResult> {
    check_aq(form, a, q)?;
    if q == 1 {
        return delta_value(form, s);
    }
    let (c0, terms) = additive_expansion(q)?;
    let lf = local_factor(form, q)?;
    let p = lf.p((-s * (q as f64).ln()).exp());
    let mut parts = Vec::with_capacity(terms.len());
    for (i, (chi, w)) in terms.iter().enumerate() {
        if i == 0 {
            parts.push((c0 + w * chi.value(a) * p, delta_value(form, s)?));
        } else {
            parts.push((w * chi.value(a), delta_value(&twist_form(form, chi)?, s)?));
        }
    }
    Ok(combine(&parts, Method::CharacterExpansion))
}

/// Λ_f(s, a/q) by the character expansion; to the right of the AFE
/// envelope the Dirichlet series is summed directly.
pub fn additive_twist_lambda(form: &FormDescriptor, s: Complex64, a: i64, q: u64) -> Result<EvalResult> {
    check_aq(form, a, q)?;
    if s.re > SIGMA_MAX {
        let g = gamma_factor(form, s)?;
        let r = direct_series(form, s, SeriesKind::LAdditive(Rational64::new(a, q as i64)), DEFAULT_SERIES_CUTOFF)?;
        return Ok(EvalResult::new(g * r.value, g.norm() * r.error, Method::DirectSeries));
    }
    if q == 1 {
        return afe_lambda(form, s);
    }
    let (c0, terms) = additive_expansion(q)?;
    let lf = local_factor(form, q)?;
    let p = lf.p((-s * (q as f64).ln()).exp());
    let mut parts = Vec::with_capacity(terms.len());
    for (i, (chi, w)) in terms.iter().enumerate() {
        if i == 0 {
            parts.push((c0 + w * chi.value(a) * p, afe_lambda(form, s)?));
        } else {
            parts.push((w * chi.value(a), afe_lambda(&twist_form(form, chi)?, s)?));
        }
    }
    Ok(combine(&parts, Method::CharacterExpansion))
}

fn completed_series(form: &FormDescriptor, s: Complex64, kind: SeriesKind) -> Result<EvalResult> {
    let g = gamma_factor(form, s)?;
    let r = direct_series(form, s, kind, DEFAULT_SERIES_CUTOFF)?;
    Ok(EvalResult::new(g * r.value, g.norm() * r.error, Method::DirectSeries))
}

/// H_{f,α}(s) = Δ_f(s,α) − ε(i·sgn α)^k (Nα²)^{s−1/2} Δ_f̄(s, −1/(Nα)), where
/// Δ_f(s,α) = Γ_C(s+(k−1)/2)Σ c_f(n)e(nα)n^{-s}. Series regime only.
pub fn h_value(form: &FormDescriptor, alpha: Rational64, s: Complex64) -> Result<EvalResult> {
    if *alpha.numer() == 0 {
        return Err(Error::InvalidInput("α must be nonzero".into()));
    }
    if s.re < SERIES_SIGMA_FLOOR {
        return Err(Error::InvalidInput(format!(
            "H is evaluated in the series regime Re(s) ≥ {SERIES_SIGMA_FLOOR} only"
        )));
    }
    let n = form.level() as i64;
    let eps = root_number(form)?;
    let k = form.weight() as i32;
    let sgn = if alpha > Rational64::from_integer(0) { 1.0 } else { -1.0 };
    let ik = Complex64::new(0.0, sgn).powi(k);
    let na2 = (Rational64::from_integer(n) * alpha * alpha).to_f64_lossy();
    let coef = eps * ik * ((s - 0.5) * na2.ln()).exp();
    let beta = -(Rational64::from_integer(n) * alpha).recip();
    let main = completed_series(form, s, SeriesKind::DAdditive(alpha))?;
    let dual = completed_series(&form.dual(), s, SeriesKind::DAdditive(beta))?;
    Ok(combine(&[(Complex64::new(1.0, 0.0), main), (-coef, dual)], Method::DirectSeries))
}

/// Γ_C(s+(k−1)/2)Σ c_f(n)e(na/q)n^{-s} from e(m/q) = c₀ + Σ_χ w_χ χ(m):
/// Σ_χ c_f(n)χ(n)n^{-s} is the D-series of f⊗χ, and of L(s,χ₀) for χ₀.
fn d_additive_expanded(form: &FormDescriptor, s: Complex64, a: i64, q: u64) -> Result<EvalResult> {
    check_aq(form, a, q)?;
    if q == 1 {
        return delta_value(form, s);
    }
    let (c0, terms) = additive_expansion(q)?;
    let g = gamma_factor(form, s)?;
    let mut parts = vec![(Complex64::new(c0, 0.0), delta_value(form, s)?)];
    for (chi, w) in terms {
        if chi.is_trivial() {
            let [l0, l1, l2] = multiplicative_twist_values(form, &chi, s)?;
            let r = l1.value / l0.value;
            let v = g * (l2.value - l1.value * r);
            let e = g.norm() * (l2.error + 2.0 * r.norm() * l1.error + r.norm_sqr() * l0.error);
            parts.push((w, EvalResult::new(v, e, Method::CharacterExpansion)));
        } else {
            parts.push((w * chi.value(a), delta_value(&twist_form(form, &chi)?, s)?));
        }
    }
    Ok(combine(&parts, Method::CharacterExpansion))
}

/// H_{f,α}(s) through the character expansion, for α and −1/(Nα) with
/// denominators 1 or primes not dividing N. Not limited to the series regime.
pub fn h_value_expanded(form: &FormDescriptor, alpha: Rational64, s: Complex64) -> Result<EvalResult> {
    if *alpha.numer() == 0 {
        return Err(Error::InvalidInput("α must be nonzero".into()));
    }
    let n = form.level() as i64;
    let beta = -(Rational64::from_integer(n) * alpha).recip();
    let eps = root_number(form)?;
    let sgn = if alpha > Rational64::from_integer(0) { 1.0 } else { -1.0 };
    let ik = Complex64::new(0.0, sgn).powi(form.weight() as i32);
    let na2 = (Rational64::from_integer(n) * alpha * alpha).to_f64_lossy();
    let coef = eps * ik * ((s - 0.5) * na2.ln()).exp();
    let main = d_additive_expanded(form, s, *alpha.numer(), *alpha.denom() as u64)?;
    let dual = d_additive_expanded(&form.dual(), s, *beta.numer(), *beta.denom() as u64)?;
    Ok(combine(&[(Complex64::new(1.0, 0.0), main), (-coef, dual)], Method::CharacterExpansion))
}

trait ToF64 {
    fn to_f64_lossy(&self) -> f64;
}
impl ToF64 for Rational64 {
    fn to_f64_lossy(&self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }
}

/// The cusp a/q is carried to −(Na)⁻¹/q by the Fricke involution of level Nq².
pub fn dual_numerator(level: u64, a: i64, q: u64) -> i64 {
    if q == 1 {
        return 0;
    }
    let na = (level as i128 * a as i128).rem_euclid(q as i128) as i64;
    (-(mod_inv(na, q).expect("gcd(Na, q) = 1") as i64)).rem_euclid(q as i64)
}

fn check_g_prime(form: &FormDescriptor, p: u64) -> Result<i64> {
    let n = form.level();
    if !is_prime(p) || p % n != 1 % n {
        return Err(Error::InvalidInput(format!("p = {p} must be a prime ≡ 1 mod {n}")));
    }
    if p == n + 1 {
        return Err(Error::InvalidInput(format!("p = N + 1 = {p} is excluded")));
    }
    Ok(-(mod_inv(n as i64, p).expect("p prime, p ∤ N") as i64))
}

/// G_{f,p}(s) = Δ_{f,1,p}(s) − Δ_{f,−N̄,p}(s).
pub fn g_value(form: &FormDescriptor, p: u64, s: Complex64) -> Result<EvalResult> {
    let b = check_g_prime(form, p)?;
    if s.re >= SERIES_SIGMA_FLOOR {
        let x = completed_series(form, s, SeriesKind::DTwist { a: 1, q: p })?;
        let y = completed_series(form, s, SeriesKind::DTwist { a: b, q: p })?;
        return Ok(combine(&[(Complex64::new(1.0, 0.0), x), (Complex64::new(-1.0, 0.0), y)], Method::DirectSeries));
    }
    let x = delta_aq_value(form, s, 1, p)?;
    let y = delta_aq_value(form, s, b, p)?;
    Ok(combine(&[(Complex64::new(1.0, 0.0), x), (Complex64::new(-1.0, 0.0), y)], Method::CharacterExpansion))
}

/// Both sides of 2^{1−2s}H_{f,1}(s) − H_{f,1/2}(s) = P_{f,2}(2^{1−s})Δ_f(s) − R_{f,2}(2^{-s})Λ_f(s)
/// for a level-one form. The H side comes from the character expansion
/// inside the evaluation envelope (the smoothed series for e(n/2)-phases is
/// biased by the poles of the Euler factor at 2), the right side from series.
pub fn level_one_closed_form(form: &FormDescriptor, s: Complex64) -> Result<(EvalResult, EvalResult)> {
    if form.level() != 1 {
        return Err(Error::InvalidInput("closed form needs level 1".into()));
    }
    let two = 2f64.ln();
    let c = ((1.0 - 2.0 * s) * two).exp();
    let h = |al: Rational64| if s.re <= SIGMA_MAX - 0.5 { h_value_expanded(form, al, s) } else { h_value(form, al, s) };
    let h1 = h(Rational64::from_integer(1))?;
    let h2 = h(Rational64::new(1, 2))?;
    let lhs = combine(&[(c, h1), (Complex64::new(-1.0, 0.0), h2)], h2.method);
    let lf = local_factor(form, 2)?;
    let delta = completed_series(form, s, SeriesKind::D)?;
    let lam = completed_series(form, s, SeriesKind::L)?;
    let rhs = combine(
        &[(lf.p(((1.0 - s) * two).exp()), delta), (-lf.r((-s * two).exp()), lam)],
        Method::DirectSeries,
    );
    Ok((lhs, rhs))
}

#[derive(Debug, Clone)]
pub struct DistinctnessReport {
    pub p: u64,
    pub t: f64,
    /// |Λ_f(it, 1/p) − Λ_f(it, −N̄/p)|
    pub difference: f64,
    pub error: f64,
    /// first prime r ≡ 1 mod p with λ(r) ≠ 0
    pub witness_prime: u64,
    pub witness_lambda: Complex64,
    /// |λ(r)(e(1/p) − e(−N̄/p))|
    pub witness_gap: f64,
}

pub fn twist_distinctness(form: &FormDescriptor, p: u64, t: f64) -> Result<DistinctnessReport> {
    let b = check_g_prime(form, p)?;
    let s = Complex64::new(0.0, t);
    let x = additive_twist_lambda(form, s, 1, p)?;
    let y = additive_twist_lambda(form, s, b, p)?;
    let mut r = p + 1;
    let table = coefficient_table(form, 20_000)?;
    let (witness_prime, witness_lambda) = loop {
        if r as usize > table.limit {
            return Err(Error::Numerical(format!("no witness prime below {}", table.limit)));
        }
        if is_prime(r) && table.values[r as usize].norm() > 1e-12 {
            break (r, table.values[r as usize]);
        }
        r += p;
    };
    let gap = witness_lambda * (e_frac(1.0 / p as f64) - e_frac(b.rem_euclid(p as i64) as f64 / p as f64));
    Ok(DistinctnessReport {
        p,
        t,
        difference: (x.value - y.value).norm(),
        error: x.error + y.error,
        witness_prime,
        witness_lambda,
        witness_gap: gap.norm(),
    })
}

/// Residual of Δ_{f,a,q}(s) = εξ(q)(Nq²)^{1/2−s}Δ_{f̄,−N̄a,q}(1−s)
///   + Λ_f(s,a/q)(ψ′((k+1)/2−s) − ψ′(s+(k−1)/2)),
/// returned as (|residual|, |Δ_{f,a,q}(s)|, combined error estimate).
pub fn delta_aq_functional_equation_residual(form: &FormDescriptor, s: Complex64, a: i64, q: u64) -> Result<(f64, f64, f64)> {
    check_aq(form, a, q)?;
    let n = form.level();
    let b = dual_numerator(n, a, q);
    let one = Complex64::new(1.0, 0.0);
    let lhs = delta_aq_value(form, s, a, q)?;
    let refl = delta_aq_value(&form.dual(), one - s, b, q)?;
    let lam = additive_twist_lambda(form, s, a, q)?;
    let kappa = (form.weight() as f64 - 1.0) / 2.0;
    let corr = trigamma(one * (kappa + 1.0) - s)? - trigamma(s + kappa)?;
    let eps = root_number(form)?;
    let cond = (n * q * q) as f64;
    let fac = eps * form.xi(q) * ((Complex64::new(0.5, 0.0) - s) * cond.ln()).exp();
    let res = lhs.value - fac * refl.value - lam.value * corr;
    let err = lhs.error + fac.norm() * refl.error + corr.norm() * lam.error;
    Ok((res.norm(), lhs.value.norm(), err))
}
