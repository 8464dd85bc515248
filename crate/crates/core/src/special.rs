//! Standard normal distribution helpers built on `erfc`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// 1/sqrt(2*pi)
pub const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Standard normal density.
#[inline]
pub fn norm_pdf(z: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * z * z).exp()
}

/// Standard normal CDF, accurate in both tails.
#[inline]
pub fn norm_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z * FRAC_1_SQRT_2)
}

/// Upper tail `1 - norm_cdf(z)` without cancellation.
#[inline]
pub fn norm_sf(z: f64) -> f64 {
    0.5 * libm::erfc(z * FRAC_1_SQRT_2)
}

/// `P(lo < Z <= hi)` for a standard normal `Z`, picking the tail that avoids
/// cancellation. Infinite arguments are allowed.
#[inline]
pub fn norm_interval(lo: f64, hi: f64) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    if lo >= 0.0 {
        norm_sf(lo) - norm_sf(hi)
    } else if hi <= 0.0 {
        norm_cdf(hi) - norm_cdf(lo)
    } else {
        1.0 - norm_cdf(lo) - norm_sf(hi)
    }
}

/// Gaussian density with standard deviation `sigma` evaluated at offset `d`.
#[inline]
pub fn gauss_density(d: f64, sigma: f64) -> f64 {
    let z = d / sigma;
    INV_SQRT_2PI * (-0.5 * z * z).exp() / sigma
}

/// `sqrt(2/pi)`, the expected local time of standard Brownian motion at its
/// starting point after unit time.
pub fn sqrt_two_over_pi() -> f64 {
    (2.0 / PI).sqrt()
}
