//! Standard normal pdf/cdf/quantile helpers used by the density, copula,
//! and generator modules.

use statrs::distribution::{ContinuousCDF, Normal};

const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

fn standard() -> Normal {
    Normal::new(0.0, 1.0).expect("standard normal parameters are valid")
}

pub fn pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / SQRT_2PI
}

pub fn cdf(x: f64) -> f64 {
    standard().cdf(x)
}

/// Inverse standard normal CDF; requires `p` in the open interval (0, 1).
pub fn inv_cdf(p: f64) -> f64 {
    debug_assert!(p > 0.0 && p < 1.0, "inv_cdf requires p in (0,1), got {p}");
    standard().inverse_cdf(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn pdf_at_zero_is_inverse_sqrt_2pi() {
        assert_abs_diff_eq!(pdf(0.0), 0.398_942_280_401_432_7, epsilon = 1e-15);
    }

    #[test]
    fn cdf_and_quantile_are_inverse() {
        for &p in &[0.001, 0.025, 0.5, 0.8, 0.999] {
            assert_abs_diff_eq!(cdf(inv_cdf(p)), p, epsilon = 1e-9);
        }
    }
}
