//! Log-domain summation.
//!
//! Weights of the mixture are stored as `w = ln c`, with `c` complex. Sums of
//! such weights are formed by shifting every exponent by the largest real
//! part, which keeps the partial sums in floating-point range even when the
//! exponents sit around `-10^4`.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// `ln Σ exp(t_j)` over complex exponents.
///
/// The imaginary part of the result is only defined modulo `2π`. Terms with a
/// real part of `-inf` contribute nothing; if every term is `-inf`, or the
/// shifted sum cancels exactly, the result has a real part of `-inf`.
pub fn log_sum_exp(terms: &[Complex64]) -> Result<Complex64> {
    if terms.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(log_sum_exp_iter(terms.iter().copied()))
}

/// Real-valued variant of [`log_sum_exp`].
pub fn log_sum_exp_real(terms: &[f64]) -> Result<f64> {
    if terms.is_empty() {
        return Err(Error::EmptyInput);
    }
    let shift = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if shift == f64::NEG_INFINITY {
        return Ok(shift);
    }
    let s: f64 = terms.iter().map(|t| (t - shift).exp()).sum();
    Ok(shift + s.ln())
}

pub(crate) fn log_sum_exp_iter<I>(terms: I) -> Complex64
where
    I: IntoIterator<Item = Complex64>,
    I::IntoIter: Clone,
{
    let it = terms.into_iter();
    let shift = it.clone().map(|t| t.re).fold(f64::NEG_INFINITY, f64::max);
    if shift == f64::NEG_INFINITY || shift.is_nan() {
        return Complex64::new(shift, 0.0);
    }
    let s: Complex64 = it.filter(|t| t.re > f64::NEG_INFINITY).map(|t| (t - shift).exp()).sum();
    if s == Complex64::new(0.0, 0.0) {
        return Complex64::new(f64::NEG_INFINITY, 0.0);
    }
    s.ln() + shift
}

/// Wraps an angle into `(-π, π]`.
pub(crate) fn wrap_phase(phi: f64) -> f64 {
    let two_pi = std::f64::consts::TAU;
    let mut x = phi.rem_euclid(two_pi);
    if x > std::f64::consts::PI {
        x -= two_pi;
    }
    x
}
