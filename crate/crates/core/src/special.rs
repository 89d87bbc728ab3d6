//! Thin wrappers around the special functions used throughout the crate.

use std::f64::consts::{PI, SQRT_2};

pub use statrs::function::gamma::ln_gamma;

/// Error function (libm, correctly rounded to about one ulp).
pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

/// Complementary error function without cancellation in the upper tail.
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

pub fn gamma(x: f64) -> f64 {
    statrs::function::gamma::gamma(x)
}

pub fn ln_factorial(n: u32) -> f64 {
    ln_gamma(n as f64 + 1.0)
}

/// Standard normal density.
pub fn std_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Standard normal CDF, accurate in both tails.
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / SQRT_2)
}

/// Upper tail `1 - Phi(x)`.
pub fn std_normal_sf(x: f64) -> f64 {
    0.5 * erfc(x / SQRT_2)
}

/// `Phi(b) - Phi(a)` without cancellation when both ends sit in the same tail.
pub fn std_normal_interval(a: f64, b: f64) -> f64 {
    if a >= 0.0 {
        std_normal_sf(a) - std_normal_sf(b)
    } else if b <= 0.0 {
        std_normal_cdf(b) - std_normal_cdf(a)
    } else {
        1.0 - std_normal_cdf(a) - std_normal_sf(b)
    }
}

/// Density of `N(mean, var)` for `var > 0`.
pub fn normal_pdf(mean: f64, var: f64, x: f64) -> f64 {
    let z = x - mean;
    (-(z * z) / (2.0 * var)).exp() / (2.0 * PI * var).sqrt()
}

/// CDF of `N(0, var)`; `var == 0` is the point mass at the origin.
pub fn centered_normal_cdf(var: f64, x: f64) -> f64 {
    if var == 0.0 {
        if x >= 0.0 {
            1.0
        } else {
            0.0
        }
    } else {
        std_normal_cdf(x / var.sqrt())
    }
}
