//! Exact bookkeeping for the exponents and thresholds of the simple-zero
//! bounds. Every closed form is a rational; floats appear only in sweeps.

use crate::{Error, Result};
use num_rational::Rational64;
use num_traits::{One, Zero};

fn r(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

fn in_range(name: &str, x: Rational64, lo: Rational64, hi: Rational64) -> Result<()> {
    if x < lo || x > hi {
        return Err(Error::InvalidInput(format!("{name} = {x} outside [{lo}, {hi}]")));
    }
    Ok(())
}

/// The κ solving 6(1−κ)/(3κ−1) = 1.
pub fn kappa_threshold() -> Rational64 {
    // 6 − 6κ = 3κ − 1
    r(6 + 1, 6 + 3)
}

/// (1−θ)/3, the exponent when θ is away from 1.
pub fn small_theta_exponent(theta: Rational64) -> Result<Rational64> {
    in_range("θ", theta, r(1, 2), Rational64::one())?;
    Ok((Rational64::one() - theta) / 3)
}

/// 2θ/3 − 1/6, the exponent when θ is close to 1.
pub fn large_theta_exponent(theta: Rational64) -> Result<Rational64> {
    in_range("θ", theta, r(1, 2), Rational64::one())?;
    Ok(theta * r(2, 3) - r(1, 6))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentInputs {
    pub theta: Rational64,
    /// Continuation abscissa Θ.
    pub big_theta: Rational64,
    /// Subconvexity exponent μ.
    pub mu: Rational64,
}

impl ExponentInputs {
    pub fn validate(&self) -> Result<()> {
        in_range("θ", self.theta, r(1, 2), Rational64::one())?;
        in_range("Θ", self.big_theta, Rational64::zero(), Rational64::one())?;
        in_range("μ", self.mu, Rational64::zero(), r(1, 2))
    }
}

/// (1−2μ)(1−θ) + Θ − 1/2.
pub fn general_bound_exponent(inputs: ExponentInputs) -> Result<Rational64> {
    inputs.validate()?;
    let one = Rational64::one();
    Ok((one - inputs.mu * 2) * (one - inputs.theta) + inputs.big_theta - r(1, 2))
}

/// c(α) = min{3/(2−α), 3/(3α−1)} for α ∈ (1/2, 1].
pub fn density_c(alpha: Rational64) -> Result<Rational64> {
    if alpha <= r(1, 2) || alpha > Rational64::one() {
        return Err(Error::InvalidInput(format!("α = {alpha} outside (1/2, 1]")));
    }
    let (a, b) = density_c_branches(alpha);
    Ok(a.min(b))
}

/// The two branches 3/(2−α) and 3/(3α−1) of c(α).
pub fn density_c_branches(alpha: Rational64) -> (Rational64, Rational64) {
    let three = Rational64::from_integer(3);
    (three / (Rational64::from_integer(2) - alpha), three / (alpha * 3 - 1))
}

/// (4(1−β), 6(1−β)/(3β−1)) for β ∈ [3/4, 1].
pub fn density_bound_exponents(beta: Rational64) -> Result<(Rational64, Rational64)> {
    in_range("β", beta, r(3, 4), Rational64::one())?;
    let gap = Rational64::one() - beta;
    Ok((gap * 4, gap * 6 / (beta * 3 - 1)))
}

/// Guaranteed exponent: 2θ/3 − 1/6 when θ > 7/9, else (1−θ)/3.
pub fn headline_exponent(theta: Rational64) -> Result<Rational64> {
    if theta > kappa_threshold() {
        large_theta_exponent(theta)
    } else {
        small_theta_exponent(theta)
    }
}

/// The level-one exponent 1/5.
pub fn level_one_exponent() -> Rational64 {
    r(1, 5)
}

/// One exactly reproduced constant.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantCheck {
    pub name: &'static str,
    pub value: Rational64,
    pub expected: Rational64,
}

impl ConstantCheck {
    pub fn passes(&self) -> bool {
        self.value == self.expected
    }
}

/// The published constants, each recomputed from the formulas above.
pub fn constant_checks() -> Result<Vec<ConstantCheck>> {
    let k = kappa_threshold();
    let (c1, c2) = density_c_branches(r(3, 4));
    Ok(vec![
        ConstantCheck { name: "kappa", value: k, expected: r(7, 9) },
        ConstantCheck { name: "kappa_plug_back", value: r(6, 1) * (Rational64::one() - k) / (k * 3 - 1), expected: r(1, 1) },
        ConstantCheck { name: "small_theta_at_kappa", value: small_theta_exponent(k)?, expected: r(2, 27) },
        ConstantCheck { name: "large_theta_at_kappa", value: large_theta_exponent(k)?, expected: r(19, 54) },
        ConstantCheck { name: "four_one_minus_kappa", value: (Rational64::one() - k) * 4, expected: r(8, 9) },
        ConstantCheck { name: "level_one", value: level_one_exponent(), expected: r(1, 5) },
        ConstantCheck { name: "density_c_branch_a_at_3_4", value: c1, expected: r(12, 5) },
        ConstantCheck { name: "density_c_branch_b_at_3_4", value: c2, expected: r(12, 5) },
        ConstantCheck { name: "density_second_at_kappa", value: density_bound_exponents(k)?.1, expected: r(1, 1) },
    ])
}
