use l2lab::arithmetic::{enumerate_characters, psi_p, CharacterHandle};
use l2lab::forms::{registry_form, twist_form};
use l2lab::lfunc::*;
use l2lab::special::gamma_c;
use l2lab::Complex64;
use num_rational::Rational64;

fn c(x: f64, y: f64) -> Complex64 {
    Complex64::new(x, y)
}

fn quad5() -> CharacterHandle {
    enumerate_characters(5).unwrap().iter().find(|x| x.order() == 2).unwrap().clone()
}

#[test]
fn registry_root_numbers() {
    for name in ["delta", "ec11", "ec32"] {
        let eps = root_number(&registry_form(name).unwrap()).unwrap();
        assert!((eps - 1.0).norm() < 1e-8, "{name}: {eps}");
    }
}

#[test]
fn twisted_root_number_matches_gauss_sum_formula() {
    let delta = registry_form("delta").unwrap();
    root_number(&delta).unwrap();
    for chi in [quad5(), psi_p(7).unwrap()] {
        let g = twist_form(&delta, &chi).unwrap();
        let eps = root_number(&g).unwrap();
        assert!((eps.norm() - 1.0).abs() < 1e-8);
        let formula = g.twist_root_number_formula().unwrap();
        assert!((eps - formula).norm() < 1e-8, "{eps} vs {formula}");
    }
}

#[test]
fn afe_matches_euler_product_at_three() {
    let delta = registry_form("delta").unwrap();
    let s = c(3.0, 0.0);
    let l = afe_l(&delta, s).unwrap().value;
    let table = l2lab::forms::coefficient_table(&delta, 10_000).unwrap();
    let mut prod = Complex64::new(1.0, 0.0);
    for p in l2lab::arithmetic::primes_up_to(10_000) {
        let x = (p as f64).powf(-3.0);
        prod /= 1.0 - table.values[p as usize] * x + x * x;
    }
    assert!((l - prod).norm() < 1e-10 * prod.norm());
}

#[test]
fn afe_matches_series_at_two_and_a_half() {
    let delta = registry_form("delta").unwrap();
    let s = c(2.5, 0.0);
    let a = afe_lambda(&delta, s).unwrap();
    let d = direct_series(&delta, s, SeriesKind::L, DEFAULT_SERIES_CUTOFF).unwrap();
    let g = gamma_c(s + 5.5).unwrap();
    assert!((a.value - g * d.value).norm() < 1e-8 * a.value.norm());
}

#[test]
fn functional_equation_in_the_strip() {
    for name in ["delta", "ec11", "ec32"] {
        let f = registry_form(name).unwrap();
        for s in [c(0.7, 3.0), c(0.2, -11.0), c(-0.8, 25.0)] {
            let lam = afe_lambda(&f, s).unwrap().value;
            let r = functional_equation_residual(&f, s).unwrap();
            // relative to |Λ| rather than max(|Λ|, 1)
            assert!(r * lam.norm().max(1.0) < 1e-7 * lam.norm(), "{name} {s}: {r}");
        }
    }
}

#[test]
fn series_floor_and_envelope() {
    let f = registry_form("delta").unwrap();
    assert!(direct_series(&f, c(1.0, 0.0), SeriesKind::L, 1000).is_err());
    assert!(afe_lambda(&f, c(0.5, 70.0)).is_err());
    assert!(afe_lambda(&f, c(-1.5, 0.0)).is_err());
}

#[test]
fn additive_zero_is_untwisted() {
    let f = registry_form("ec11").unwrap();
    let s = c(2.0, 1.0);
    let a = direct_series(&f, s, SeriesKind::L, 20_000).unwrap();
    let b = direct_series(&f, s, SeriesKind::LAdditive(Rational64::from_integer(0)), 20_000).unwrap();
    assert_eq!(a.value, b.value);
}

#[test]
fn derivative_matches_finite_difference() {
    let f = registry_form("ec11").unwrap();
    let s = c(0.6, 4.0);
    let d1 = lambda_derivative(&f, s, 1).unwrap();
    let h = 1e-3;
    let fd = (afe_lambda(&f, s + h).unwrap().value - afe_lambda(&f, s - h).unwrap().value) / (2.0 * h);
    assert!((d1.value - fd).norm() < 1e-6 * d1.value.norm().max(1e-3), "{} vs {fd}", d1.value);
    assert!(lambda_derivative(&f, s, 3).is_err());
}

#[test]
fn delta_at_two_matches_series() {
    let delta = registry_form("delta").unwrap();
    let s = c(2.0, 0.0);
    let d = delta_value(&delta, s).unwrap();
    let g = gamma_c(s + 5.5).unwrap();
    let ser = direct_series(&delta, s, SeriesKind::D, DEFAULT_SERIES_CUTOFF).unwrap();
    let diff = (d.value - g * ser.value).norm();
    assert!(diff <= d.error + g.norm() * ser.error + 1e-12 * d.value.norm(), "{diff}");
}

#[test]
fn multiplicative_twist_against_series() {
    let delta = registry_form("delta").unwrap();
    let chi = quad5();
    let s = c(2.0, 0.0);
    let [l, l1, l2] = multiplicative_twist_values(&delta, &chi, s).unwrap();
    let g = twist_form(&delta, &chi).unwrap();
    let ser = direct_series(&g, s, SeriesKind::L, DEFAULT_SERIES_CUTOFF).unwrap();
    assert!((l.value - ser.value).norm() < 1e-8 * ser.value.norm());
    let d = direct_series(&g, s, SeriesKind::D, DEFAULT_SERIES_CUTOFF).unwrap();
    let dj = l2.value - l1.value * l1.value / l.value;
    let bound = d.error + l2.error + 2.0 * l1.error * (l1.value / l.value).norm() + 1e-10 * d.value.norm();
    assert!((dj - d.value).norm() < bound, "{} vs {bound}", (dj - d.value).norm());
    // trivial modulus one gives the untwisted values
    let [u, _, _] = multiplicative_twist_values(&delta, &CharacterHandle::trivial(1), s).unwrap();
    assert!((u.value - afe_l(&delta, s).unwrap().value).norm() < 1e-12);
}

#[test]
fn principal_character_twist_is_euler_factor_removed() {
    let f = registry_form("ec11").unwrap();
    let chi0 = enumerate_characters(3).unwrap()[0].clone();
    let s = c(2.0, 0.5);
    let [l, _, _] = multiplicative_twist_values(&f, &chi0, s).unwrap();
    let t = l2lab::forms::coefficient_table(&f, 200_000).unwrap();
    let direct: Complex64 = (1..200_000usize)
        .filter(|n| n % 3 != 0)
        .map(|n| t.values[n] * (-s * (n as f64).ln()).exp())
        .sum();
    assert!((l.value - direct).norm() < 1e-7);
}

#[test]
fn delta_aq_matches_coefficient_series() {
    let delta = registry_form("delta").unwrap();
    let s = c(2.0, 0.0);
    let v = delta_aq_value(&delta, s, 1, 3).unwrap();
    let g = gamma_c(s + 5.5).unwrap();
    let ser = direct_series(&delta, s, SeriesKind::DTwist { a: 1, q: 3 }, DEFAULT_SERIES_CUTOFF).unwrap();
    let diff = (v.value - g * ser.value).norm();
    assert!(diff <= v.error + g.norm() * ser.error + 1e-10 * v.value.norm(), "{diff} {}", v.error);
    let q1 = delta_aq_value(&delta, s, 1, 1).unwrap();
    assert!((q1.value - delta_value(&delta, s).unwrap().value).norm() < 1e-14 * q1.value.norm());
}

#[test]
fn prop_two_one_residual() {
    let delta = registry_form("delta").unwrap();
    let (r, mag, _) = delta_aq_functional_equation_residual(&delta, c(1.4, 2.0), 1, 3).unwrap();
    assert!(r < 1e-6 * mag.max(1.0), "{r} {mag}");
}

#[test]
fn additive_twist_lambda_against_series() {
    let delta = registry_form("delta").unwrap();
    let s = c(2.0, 0.0);
    let v = additive_twist_lambda(&delta, s, 1, 5).unwrap();
    let g = gamma_c(s + 5.5).unwrap();
    let ser = direct_series(&delta, s, SeriesKind::LAdditive(Rational64::new(1, 5)), DEFAULT_SERIES_CUTOFF).unwrap();
    assert!((v.value - g * ser.value).norm() < 1e-8 * v.value.norm());
    assert!(additive_twist_lambda(&delta, s, 5, 5).is_err());
    // finite and smooth to the left of the strip
    let vals: Vec<Complex64> = (0..5).map(|j| additive_twist_lambda(&delta, c(-0.5, 2.0 + 0.1 * j as f64), 2, 5).unwrap().value).collect();
    let scale = vals.iter().map(|v| v.norm()).fold(0.0, f64::max);
    for w in vals.windows(3) {
        assert!((w[0] - 2.0 * w[1] + w[2]).norm() < 0.1 * scale);
    }
}

#[test]
fn local_factor_data() {
    let delta = registry_form("delta").unwrap();
    let one = local_factor(&delta, 1).unwrap();
    assert_eq!(one.p(c(0.3, 0.1)), c(1.0, 0.0));
    assert_eq!(one.r(c(0.3, 0.1)), c(0.0, 0.0));
    for q in [2u64, 3, 5, 7, 11, 13] {
        let lf = local_factor(&delta, q).unwrap();
        assert!((lf.alpha * lf.beta - lf.xi_q).norm() < 1e-12);
        assert!((lf.alpha + lf.beta - lf.lambda_q).norm() < 1e-12);
        assert!(lf.relation_residual < 1e-10);
        if lf.lambda_q.norm() < 2.0 {
            assert!((lf.alpha.norm() - 1.0).abs() < 1e-12 && (lf.beta.norm() - 1.0).abs() < 1e-12);
        }
    }
    assert!(local_factor(&registry_form("ec11").unwrap(), 11).is_err());
}

#[test]
fn r_residue_by_contour() {
    let lf = local_factor(&registry_form("delta").unwrap(), 5).unwrap();
    let lq = 5f64.ln();
    let s0 = c(0.0, lf.theta / lq);
    let n = 64;
    let r = 1e-2;
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..n {
        let w = Complex64::from_polar(1.0, std::f64::consts::TAU * j as f64 / n as f64);
        acc += lf.r((-(s0 + r * w) * lq).exp()) * r * w;
    }
    let res = acc / n as f64;
    assert!((res - lf.r_residue()).norm() < 1e-10 * lf.r_residue().norm(), "{res} vs {}", lf.r_residue());
}

#[test]
fn first_h_difference() {
    for (name, p) in [("delta", 5i64), ("ec32", 97)] {
        let f = registry_form(name).unwrap();
        let s = c(2.0, 1.0);
        let w = ((1.0 - 2.0 * s) * (p as f64).ln()).exp();
        let h1 = h_value(&f, Rational64::from_integer(1), s).unwrap();
        let hp = h_value(&f, Rational64::new(1, p), s).unwrap();
        let g = gamma_c(s + (f.weight() as f64 - 1.0) / 2.0).unwrap();
        let d = direct_series(&f, s, SeriesKind::D, DEFAULT_SERIES_CUTOFF).unwrap();
        let dp = direct_series(&f, s, SeriesKind::DAdditive(Rational64::new(1, p)), DEFAULT_SERIES_CUTOFF).unwrap();
        let lhs = w * h1.value - hp.value;
        let rhs = g * (w * d.value - dp.value);
        assert!((lhs - rhs).norm() < 1e-8 * rhs.norm().max(1.0), "{name}: {}", (lhs - rhs).norm());
    }
}

#[test]
fn key_h_difference() {
    let f = registry_form("ec11").unwrap();
    let (p, d) = (23i64, 2i64);
    for t in [0.0, 0.5, -1.5] {
        let s = c(2.0, t);
        let w = ((1.0 - 2.0 * s) * (p as f64).ln()).exp();
        let h = |a: Rational64| h_value(&f, a, s).unwrap().value;
        let lhs = w * h(Rational64::from_integer(d)) - h(Rational64::new(d, p)) - w * h(Rational64::from_integer(1))
            + h(Rational64::new(1, p));
        let rhs = g_value(&f, p as u64, s).unwrap().value;
        assert!((lhs - rhs).norm() < 1e-8 * rhs.norm().max(1.0), "t={t}: {}", (lhs - rhs).norm());
    }
}

#[test]
fn level_one_closed_form_sign() {
    let delta = registry_form("delta").unwrap();
    let (lhs, rhs) = level_one_closed_form(&delta, c(2.0, 0.0)).unwrap();
    assert!((lhs.value - rhs.value).norm() < 1e-8 * rhs.value.norm().max(1.0));
}

#[test]
fn g_and_h_preconditions() {
    let delta = registry_form("delta").unwrap();
    assert!(g_value(&delta, 2, c(2.0, 0.0)).is_err());
    assert!(h_value(&delta, Rational64::from_integer(0), c(2.0, 0.0)).is_err());
    assert!(h_value(&delta, Rational64::from_integer(1), c(1.0, 0.0)).is_err());
    let g = g_value(&delta, 3, c(2.0, 0.0)).unwrap();
    assert!(g.value.norm().is_finite());
}

#[test]
fn distinctness() {
    let delta = registry_form("delta").unwrap();
    let r = twist_distinctness(&delta, 3, 1.0).unwrap();
    assert_eq!(r.witness_prime, 7);
    assert!(r.witness_gap > 0.0 && r.difference > r.error);
    assert!(twist_distinctness(&delta, 2, 1.0).is_err());
}
