//! Dimensional constants `s_m`, `d_m`, `h_m` and the constant-mode variance
//! parameterisation.
//!
//! `s_m L^m` is the leading term of the dimension of the space spanned by
//! eigenfunctions with eigenvalue at most `L^2`, while `d_m L^{m+2}` and
//! `h_m L^{m+4}` are the leading terms of the gradient and Hessian covariances.

use crate::error::{invalid, Error, Result};
use crate::special::ln_gamma;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralConstants {
    pub m: u32,
    pub s: f64,
    pub d: f64,
    pub h: f64,
    pub ln_s: f64,
    pub ln_d: f64,
    pub ln_h: f64,
}

pub fn spectral_constants(m: i64) -> Result<SpectralConstants> {
    if m < 1 {
        return Err(invalid(format!("dimension m must be >= 1, got {m}")));
    }
    if m > 1 << 20 {
        return Err(invalid(format!("dimension m = {m} is unreasonably large")));
    }
    let mf = m as f64;
    let ln_pref = -0.5 * mf * (4.0 * PI).ln();
    let ln_s = ln_pref - ln_gamma(1.0 + 0.5 * mf);
    let ln_d = ln_pref - 2f64.ln() - ln_gamma(2.0 + 0.5 * mf);
    let ln_h = ln_pref - 4f64.ln() - ln_gamma(3.0 + 0.5 * mf);
    Ok(SpectralConstants {
        m: m as u32,
        s: ln_s.exp(),
        d: ln_d.exp(),
        h: ln_h.exp(),
        ln_s,
        ln_d,
        ln_h,
    })
}

impl SpectralConstants {
    /// Relative residual of `s = h (m+2)(m+4)`, evaluated in log space so it
    /// stays meaningful after `s` underflows.
    pub fn s_identity_residual(&self) -> f64 {
        let m = self.m as f64;
        let rhs = self.ln_h + ((m + 2.0) * (m + 4.0)).ln();
        (self.ln_s - rhs).exp_m1().abs()
    }

    /// Relative residual of `d = (m+4) h`.
    pub fn d_identity_residual(&self) -> f64 {
        let m = self.m as f64;
        let rhs = self.ln_h + (m + 4.0).ln();
        (self.ln_d - rhs).exp_m1().abs()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OmegaParams {
    pub m: u32,
    #[serde(rename = "L")]
    pub l: f64,
    pub r: f64,
    pub omega_bar: f64,
    pub omega: f64,
    pub s_omega: f64,
    /// `r d^2 / h`, the second evaluation of `s_omega`.
    pub s_omega_alt: f64,
    pub constants: SpectralConstants,
}

/// Smallest admissible `r` for dimension `m`.
pub fn r_lower_bound(m: u32) -> f64 {
    (m as f64 + 2.0) / (m as f64 + 4.0)
}

pub fn omega_params(m: i64, l: f64, r: f64) -> Result<OmegaParams> {
    let c = spectral_constants(m)?;
    if !(l > 0.0 && l.is_finite()) {
        return Err(invalid(format!("L must be positive and finite, got {l}")));
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(invalid(format!("r must be positive and finite, got {r}")));
    }
    let mf = m as f64;
    // (C_m): (m+2) <= (m+4) r, compared directly to accept the boundary.
    let lhs = (mf + 4.0) * r;
    let rhs = mf + 2.0;
    let on_boundary = (lhs - rhs).abs() <= 1e-15 * rhs;
    if lhs < rhs && !on_boundary {
        return Err(Error::ConstraintViolation { m: c.m, r, bound: r_lower_bound(c.m) });
    }
    let (omega_bar, s_omega, s_omega_alt) = if on_boundary {
        (0.0, c.s, c.s)
    } else {
        let factor = r * (mf + 4.0) / (mf + 2.0);
        let s_omega = factor * c.s;
        let s_omega_alt = r * (2.0 * c.ln_d - c.ln_h).exp();
        ((factor - 1.0) * c.s, s_omega, s_omega_alt)
    };
    let omega = omega_bar * l.powf(mf);
    Ok(OmegaParams { m: c.m, l, r, omega_bar, omega, s_omega, s_omega_alt, constants: c })
}

impl OmegaParams {
    /// `kappa = (r - 1) / (2r)`, the constant-shift weight of the limit ensemble.
    pub fn kappa(&self) -> f64 {
        (self.r - 1.0) / (2.0 * self.r)
    }

    /// `h - d^2 / s_omega`, which equals `((r-1)/r) h`.
    pub fn conditional_hessian_shift(&self) -> f64 {
        self.constants.h - self.constants.d * self.constants.d / self.s_omega
    }

    /// Variance scale `s_omega L^m` used to rescale critical values.
    pub fn value_scale(&self) -> f64 {
        (self.s_omega * self.l.powf(self.m as f64)).sqrt()
    }
}

pub fn weyl_dimension_estimate(m: i64, l: f64) -> Result<f64> {
    let c = spectral_constants(m)?;
    if !(l > 0.0 && l.is_finite()) {
        return Err(invalid(format!("L must be positive and finite, got {l}")));
    }
    Ok((c.ln_s + m as f64 * l.ln()).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn low_dimensional_values() {
        let c = spectral_constants(1).unwrap();
        assert_relative_eq!(c.s, 1.0 / PI, max_relative = 1e-14);
        assert_relative_eq!(c.d, 1.0 / (3.0 * PI), max_relative = 1e-14);
        assert_relative_eq!(c.h, 1.0 / (15.0 * PI), max_relative = 1e-14);
        let c = spectral_constants(2).unwrap();
        assert_relative_eq!(c.s, 1.0 / (4.0 * PI), max_relative = 1e-14);
        assert!(spectral_constants(0).is_err());
        assert!(spectral_constants(-3).is_err());
    }

    #[test]
    fn identities_and_monotonicity() {
        let mut prev = spectral_constants(1).unwrap();
        for m in 1..=50 {
            let c = spectral_constants(m).unwrap();
            assert!(c.s_identity_residual() <= 1e-12, "m={m}");
            assert!(c.d_identity_residual() <= 1e-12, "m={m}");
            assert!(c.s > 0.0 && c.d > 0.0 && c.h > 0.0);
            if m > 1 {
                assert!(c.s < prev.s && c.d < prev.d && c.h < prev.h);
            }
            prev = c;
        }
    }

    #[test]
    fn log_space_survives_large_m() {
        let c = spectral_constants(1024).unwrap();
        assert!(c.ln_s.is_finite() && c.ln_s < -709.0);
        assert!(c.s_identity_residual() <= 1e-12);
    }

    #[test]
    fn omega_examples() {
        let p = omega_params(2, 1.0, 1.0).unwrap();
        assert_relative_eq!(p.s_omega, 3.0 / (8.0 * PI), max_relative = 1e-14);
        assert_relative_eq!(p.omega_bar, 1.0 / (8.0 * PI), max_relative = 1e-13);
        assert_relative_eq!(p.s_omega, p.s_omega_alt, max_relative = 1e-12);
        let b = omega_params(2, 3.0, 2.0 / 3.0).unwrap();
        assert_eq!(b.omega_bar, 0.0);
        assert_eq!(b.omega, 0.0);
        assert_eq!(b.s_omega, b.constants.s);
        match omega_params(2, 1.0, 0.5) {
            Err(Error::ConstraintViolation { m: 2, .. }) => {}
            other => panic!("expected constraint violation, got {other:?}"),
        }
    }

    #[test]
    fn hessian_shift_identity() {
        for &(m, r) in &[(1, 1.0), (2, 1.7), (5, 3.0), (12, 1.01)] {
            let p = omega_params(m, 2.0, r).unwrap();
            let expect = (r - 1.0) / r * p.constants.h;
            assert!((p.conditional_hessian_shift() - expect).abs() <= 1e-12 * p.constants.h);
        }
    }

    #[test]
    fn weyl_examples() {
        assert_relative_eq!(weyl_dimension_estimate(2, 10.0).unwrap(), 100.0 / (4.0 * PI), max_relative = 1e-13);
        assert_relative_eq!(weyl_dimension_estimate(1, PI).unwrap(), 1.0, max_relative = 1e-13);
    }
}
