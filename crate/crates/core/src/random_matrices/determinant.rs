//! Expected absolute determinants of shifted ensemble matrices.
//!
//! For `A ~ GOE_m^v`,
//! `E|det(A - c)| = 2^{3/2} (2v)^{(m+1)/2} Gamma((m+3)/2) exp(c^2/(4v)) rho_{m+1,v}(c)`.
//! Writing `S_m^{u,v}` as `GOE_m^v + X 1` with `X ~ N(0, u)` turns the
//! shifted-ensemble version into a Gaussian average of the same expression.

use super::correlation::{ExactRho, OnePointDensity};
use super::MatrixEnsemble;
use crate::error::{invalid, Result};
use crate::quadrature::Quadrature;
use crate::rng::{par_batches, Moments};
use crate::special::ln_gamma;
use crate::Estimate;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// `ln(2^{3/2} (2v)^{(m+1)/2} Gamma((m+3)/2))`.
pub fn abs_det_prefactor(m: usize, v: f64) -> f64 {
    let mf = m as f64;
    1.5 * 2f64.ln() + 0.5 * (mf + 1.0) * (2.0 * v).ln() + ln_gamma(0.5 * (mf + 3.0))
}

fn check_rho(m: usize, v: f64, rho: &dyn OnePointDensity) -> Result<()> {
    if rho.n() != m + 1 {
        return Err(invalid(format!("need rho_(m+1) = rho_{}, got rho_{}", m + 1, rho.n())));
    }
    if !(v > 0.0) {
        return Err(invalid(format!("v must be positive, got {v}")));
    }
    Ok(())
}

/// `E|det(A - c)|` for `A ~ GOE_m^v` from the one-point function of size `m+1`.
pub fn expected_abs_det_goe(m: usize, v: f64, c: f64, rho: &dyn OnePointDensity) -> Result<Estimate> {
    check_rho(m, v, rho)?;
    let k = (abs_det_prefactor(m, v) + c * c / (4.0 * v)).exp();
    Ok(Estimate {
        value: k * rho.value_at_variance(v, c),
        std_error: k * rho.std_error_at_variance(v, c),
    })
}

/// [`expected_abs_det_goe`] with the exact one-point function (`m <= 3`).
pub fn expected_abs_det_goe_exact(m: usize, v: f64, c: f64) -> Result<f64> {
    let rho = ExactRho::new(m + 1, v)?;
    Ok(expected_abs_det_goe(m, v, c, &rho)?.value)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShiftedDeterminant {
    /// `K (2 pi u)^{-1/2} int rho(c - x) exp((c - x)^2/(4v) - x^2/(2u)) dx`.
    pub general: Estimate,
    /// Completed-square form, available when `u = 2 k v` with `k < 1`.
    pub completed_square: Option<f64>,
}

/// `E|det(A - c)|` for `A ~ S_m^{u,v}`, `u >= 0`.
pub fn expected_abs_det_shifted(
    m: usize,
    u: f64,
    v: f64,
    c: f64,
    rho: &dyn OnePointDensity,
) -> Result<ShiftedDeterminant> {
    check_rho(m, v, rho)?;
    if u < 0.0 || u.is_nan() {
        return Err(invalid(format!("the Gaussian-average form needs u >= 0, got {u}")));
    }
    if u == 0.0 {
        let e = expected_abs_det_goe(m, v, c, rho)?;
        return Ok(ShiftedDeterminant { general: e, completed_square: Some(e.value) });
    }
    let ln_k = abs_det_prefactor(m, v);
    let q = Quadrature { abs_tol: 0.0, rel_tol: 1e-11, max_intervals: 1000 };
    let sd = u.sqrt();
    let breaks = [-6.0 * sd, -3.0 * sd, 0.0, 3.0 * sd, 6.0 * sd, c];

    let general_at = |x: f64, f: &dyn Fn(f64) -> f64| {
        let y = c - x;
        let e = y * y / (4.0 * v) - x * x / (2.0 * u);
        (ln_k + e).exp() * f(y)
    };
    let norm = (2.0 * PI * u).sqrt();
    let value = q
        .integrate_real_line(|x| general_at(x, &|y| rho.value_at_variance(v, y)), &breaks)
        .value
        / norm;
    let std_error = q
        .integrate_real_line(|x| general_at(x, &|y| rho.std_error_at_variance(v, y)), &breaks)
        .value
        / norm;

    let k = u / (2.0 * v);
    let completed_square = if k < 1.0 {
        let t2 = k / (1.0 - k);
        let pref = 1.5 * 2f64.ln() + 0.5 * m as f64 * (2.0 * v).ln() + ln_gamma(0.5 * (m as f64 + 3.0))
            - 0.5 * (2.0 * PI * k).ln();
        let centre = -t2 * c;
        let f = |x: f64| {
            let z = x + t2 * c;
            let e = -z * z / (4.0 * v * t2) + (t2 + 1.0) * c * c / (4.0 * v);
            (pref + e).exp() * rho.value_at_variance(v, c - x)
        };
        let w = (2.0 * v * t2).sqrt();
        let b = [centre - 6.0 * w, centre - 3.0 * w, centre, centre + 3.0 * w, centre + 6.0 * w, c];
        Some(q.integrate_real_line(f, &b).value)
    } else {
        None
    };
    Ok(ShiftedDeterminant { general: Estimate { value, std_error }, completed_square })
}

/// Brute-force `E|det(A - c)|` over `n_samples` draws.
pub fn expected_abs_det_mc(ens: &MatrixEnsemble, c: f64, n_samples: usize, seed: u64) -> Result<Estimate> {
    if n_samples < 2 {
        return Err(invalid("need at least 2 samples"));
    }
    let sampler = ens.sampler()?;
    let parts = par_batches(n_samples, 2048, seed, |rng, range| {
        let mut acc = Moments::default();
        for _ in range {
            let eig = sampler.draw(rng).symmetric_eigenvalues();
            acc.push(eig.iter().map(|l| (l - c).abs()).product());
        }
        acc
    });
    let mut total = Moments::default();
    parts.iter().for_each(|p| total.merge(p));
    Ok(total.estimate())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn one_by_one_is_mean_abs_normal() {
        let v = expected_abs_det_goe_exact(1, 0.5, 0.0).unwrap();
        assert_relative_eq!(v, (2.0 / PI).sqrt(), max_relative = 1e-12);
        // m = 1, v = 1/2: |N(0,1) - c| has a closed-form mean.
        let c: f64 = 0.7;
        let phi = crate::special::std_normal_pdf(c);
        let expect = 2.0 * phi + c * (2.0 * crate::special::std_normal_cdf(c) - 1.0);
        assert_relative_eq!(expected_abs_det_goe_exact(1, 0.5, c).unwrap(), expect, max_relative = 1e-11);
    }

    #[test]
    fn shifted_forms_agree_and_reduce() {
        let rho = ExactRho::new(3, 1.0).unwrap();
        let s = expected_abs_det_shifted(2, 0.5, 1.0, 0.7, &rho).unwrap();
        let cs = s.completed_square.unwrap();
        assert!((s.general.value - cs).abs() <= 1e-8 * cs);
        let goe = expected_abs_det_goe(2, 1.0, 0.7, &rho).unwrap().value;
        let tiny = expected_abs_det_shifted(2, 1e-8, 1.0, 0.7, &rho).unwrap();
        assert!((tiny.general.value - goe).abs() < 1e-6 * goe);
        assert!(expected_abs_det_shifted(2, 3.0, 1.0, 0.7, &rho).unwrap().completed_square.is_none());
    }

    #[test]
    fn mc_estimator_behaviour() {
        let ens = MatrixEnsemble::goe(1, 0.5).unwrap();
        let e = expected_abs_det_mc(&ens, 0.0, 100_000, 3).unwrap();
        assert!((e.value - (2.0 / PI).sqrt()).abs() < 3.0 * e.std_error);
        let ens = MatrixEnsemble::goe(2, 1.0).unwrap();
        let a = expected_abs_det_mc(&ens, 0.9, 50_000, 4).unwrap();
        let b = expected_abs_det_mc(&ens, -0.9, 50_000, 5).unwrap();
        assert!(a.z_score(&b) < 3.0);
        let big = expected_abs_det_mc(&ens, 0.9, 100_000, 6).unwrap();
        let ratio = a.std_error / big.std_error;
        assert!((ratio - 2f64.sqrt()).abs() < 0.15, "ratio {ratio}");
    }
}
