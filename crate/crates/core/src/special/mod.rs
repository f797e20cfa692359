//! Special functions and quadrature.

mod gamma;
mod kernel;
mod quad;

pub use gamma::{
    complex_gamma, digamma, gamma_c, ln_gamma, ln_gamma_c, ln_sin_pi, trigamma,
};
pub use kernel::{SmoothingKernel, kernel};
pub use quad::{
    adaptive, cauchy_derivatives, gk15, line_integral, Decay, QuadratureResult,
};
