//! Brownian transition density and expected local time.

use thiserror::Error;

use crate::special::{gauss_density, norm_cdf, norm_pdf, norm_sf};

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum KernelError {
    #[error("transition density needs s > t (got t = {t}, s = {s})")]
    NonPositiveTime { t: f64, s: f64 },
    #[error("duration must be nonnegative (got {0})")]
    NegativeDuration(f64),
}

/// Arguments of `p(t, x, s, y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatKernelQuery {
    pub t: f64,
    pub x: f64,
    pub s: f64,
    pub y: f64,
}

impl HeatKernelQuery {
    pub fn new(t: f64, x: f64, s: f64, y: f64) -> Result<Self, KernelError> {
        if s > t {
            Ok(Self { t, x, s, y })
        } else {
            Err(KernelError::NonPositiveTime { t, s })
        }
    }
}

/// Density of `B_s` at `y` given `B_t = x`.
pub fn heat_kernel(q: HeatKernelQuery) -> Result<f64, KernelError> {
    if q.s <= q.t {
        return Err(KernelError::NonPositiveTime { t: q.t, s: q.s });
    }
    Ok(gauss_density(q.x - q.y, (q.s - q.t).sqrt()))
}

/// `E_x[L^y_u]`, the expected local time at level `y` accumulated by time
/// `u` by Brownian motion started at `x`.
pub fn expected_local_time(x: f64, y: f64, u: f64) -> Result<f64, KernelError> {
    if u < 0.0 {
        return Err(KernelError::NegativeDuration(u));
    }
    Ok(elt(x - y, u))
}

/// Expected local time at offset `d = x - y`, for `u >= 0`. Symmetric in `d`.
#[inline]
pub(crate) fn elt(d: f64, u: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    let sigma = u.sqrt();
    let z = d.abs() / sigma;
    // d (2 Phi(d/sigma) - 1) + 2 sigma phi(d/sigma) - |d|
    // = 2 sigma (phi(z) - z Q(z)), written to avoid cancellation.
    let v = 2.0 * sigma * (norm_pdf(z) - z * norm_sf(z));
    v.max(0.0)
}

/// The closed form exactly as `d (2 Phi(d/sigma) - 1) + 2 sigma phi(d/sigma) - |d|`.
/// Kept for comparison with [`expected_local_time`]; it loses relative
/// accuracy for `|d| >> sigma`.
pub fn expected_local_time_direct(x: f64, y: f64, u: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    let d = x - y;
    let sigma = u.sqrt();
    d * (2.0 * norm_cdf(d / sigma) - 1.0) + 2.0 * sigma * norm_pdf(d / sigma) - d.abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{adaptive, QuadConfig};
    use crate::special::sqrt_two_over_pi;
    use proptest::prelude::*;

    #[test]
    fn heat_kernel_examples() {
        let p = |t, x, s, y| heat_kernel(HeatKernelQuery::new(t, x, s, y).unwrap()).unwrap();
        assert!((p(0.0, 0.0, 1.0, 0.0) - 0.398_942_280_401_432_7).abs() < 1e-15);
        assert!((p(0.0, 0.0, 1.0, 1.0) - 0.241_970_724_519_143_35).abs() < 1e-15);
        assert!((p(0.0, 0.0, 0.25, 0.0) - 0.797_884_560_802_865_4).abs() < 1e-15);
        assert!(HeatKernelQuery::new(1.0, 0.0, 1.0, 0.0).is_err());
        assert!(heat_kernel(HeatKernelQuery { t: 1.0, x: 0.0, s: 0.5, y: 0.0 }).is_err());
    }

    #[test]
    fn heat_kernel_integrates_to_one() {
        let cfg = QuadConfig { tol: 1e-13, ..QuadConfig::default() };
        let total = adaptive(&mut |y: f64| gauss_density(0.3 - y, 0.7), -12.0, 12.0, &cfg);
        assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn local_time_examples() {
        assert!((expected_local_time(0.0, 0.0, 1.0).unwrap() - sqrt_two_over_pi()).abs() < 1e-15);
        assert_eq!(expected_local_time(1.3, -0.2, 0.0).unwrap(), 0.0);
        assert!(expected_local_time(0.0, 0.0, -1.0).is_err());
        let far = expected_local_time(0.0, 10.0, 1.0).unwrap();
        // 2 (phi(10) - 10 Q(10)) from high-precision arithmetic
        assert!(far > 0.0 && far < 1e-20);
        assert!((far / 1.494_912_050_917_865_5e-24 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn direct_form_agrees_in_the_bulk() {
        for &(x, y, u) in &[(0.0, 0.5, 1.0), (1.0, -1.0, 2.0), (0.2, 0.1, 0.01)] {
            let a = expected_local_time(x, y, u).unwrap();
            let b = expected_local_time_direct(x, y, u);
            assert!((a - b).abs() < 1e-14, "{a} {b}");
        }
    }

    proptest! {
        #[test]
        fn local_time_is_symmetric(x in -5.0f64..5.0, y in -5.0f64..5.0, u in 0.0f64..5.0) {
            prop_assert_eq!(expected_local_time(x, y, u).unwrap(), expected_local_time(y, x, u).unwrap());
        }

        #[test]
        fn local_time_is_monotone_in_time(x in -3.0f64..3.0, y in -3.0f64..3.0, u in 0.0f64..4.0, du in 0.0f64..1.0) {
            prop_assert!(expected_local_time(x, y, u + du).unwrap() >= expected_local_time(x, y, u).unwrap());
        }
    }
}
