//! Numerical laboratory for degree-2 completed L-functions.
//!
//! Layers, bottom up:
//! - [`special`]: Γ, trigamma, the smoothing kernel g / ĝ, quadrature.
//! - [`arithmetic`]: Dirichlet characters and Gauss sums.
//! - [`forms`]: Hecke eigenvalues of the registry forms and their twists.
//! - [`lfunc`]: Λ via a smoothed approximate functional equation, twists, H/G objects.
//! - [`zeros`]: zero scanning, certification, density counts, explicit formula.
//! - [`exponents`]: exact exponent bookkeeping.
//!
//! Everything is double precision with an explicit error estimate attached to
//! each evaluated quantity.

pub mod arithmetic;
pub mod error;
pub mod exponents;
pub mod forms;
pub mod lfunc;
pub mod special;
pub mod zeros;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// e(x) = exp(2πix).
#[inline]
pub fn e_frac(x: f64) -> Complex64 {
    let r = x - x.floor();
    // exact at quarter turns so real characters stay real
    match r {
        0.0 => Complex64::new(1.0, 0.0),
        0.25 => Complex64::new(0.0, 1.0),
        0.5 => Complex64::new(-1.0, 0.0),
        0.75 => Complex64::new(0.0, -1.0),
        _ => Complex64::from_polar(1.0, std::f64::consts::TAU * r),
    }
}
