//! Limit laws of rescaled critical values.
//!
//! For `r >= 1` and `kappa = (r-1)/(2r)` the limit measure is
//! `sigma_{m,r} ~ gamma_{(r-1)/r} * (exp(-r l^2/4) rho_{m+1,1/r}(l) dl)`,
//! and it is proportional to the measure `mu_m` with density
//! `E|det(A - y/sqrt(r))| phi(y)`, `A ~ S_m^{2 kappa, 1}`. Both constructions
//! are implemented so that they can be audited against each other.

use crate::error::{invalid, Error, Result};
use crate::measure::{
    ks_distance, ks_empirical_fn, EmpiricalMeasure, Measure1D, UniformGrid,
};
use crate::quadrature::Quadrature;
use crate::random_matrices::{
    abs_det_prefactor, expected_abs_det_goe, expected_abs_det_shifted, rescale_correlation,
    rho_exact, rho_mc, rho_mc_conditional, sample_goe, semicircle_density, CorrelationFunction, ExactRho,
    HistogramSpec, OnePointDensity,
};
use crate::rng::{derive_seed, par_batches, Moments};
use crate::special::{centered_normal_cdf, ln_gamma, std_normal_pdf};
use crate::Estimate;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub fn default_grid() -> UniformGrid {
    UniformGrid { lo: -8.0, hi: 8.0, n: 1024 }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitMeasureSpec {
    pub m: usize,
    pub r: f64,
    pub kappa: f64,
    /// `(r-1)/(r+1)`, which equals `kappa/(1-kappa)`.
    pub tau2: f64,
    pub grid: UniformGrid,
}

impl LimitMeasureSpec {
    pub fn new(m: usize, r: f64, grid: UniformGrid) -> Result<Self> {
        if m == 0 {
            return Err(invalid("dimension m must be >= 1"));
        }
        if !(r >= 1.0 && r.is_finite()) {
            return Err(Error::RequiresRAtLeastOne(r));
        }
        Ok(Self { m, r, kappa: (r - 1.0) / (2.0 * r), tau2: (r - 1.0) / (r + 1.0), grid })
    }
}

/// How the one-point function `rho_{m+1,1}` is obtained.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum RhoSource {
    /// Exact nested quadrature (`m <= 3`), tabulated on a fine grid.
    Exact,
    /// Eigenvalue histogram of `samples` matrices.
    MonteCarlo { samples: usize, seed: u64 },
    /// Smooth conditional-density Monte Carlo estimate of `samples` matrices.
    Conditional { samples: usize, seed: u64 },
}

/// `rho_{m+1,1}` tabulated according to `source`.
pub fn tabulate_rho(m: usize, source: RhoSource) -> Result<CorrelationFunction> {
    let n = m + 1;
    let half_width = 4.0 * (n as f64).sqrt() + 8.0;
    match source {
        RhoSource::Exact => rho_exact(n, 1.0, UniformGrid::symmetric(half_width, 2401)?),
        RhoSource::MonteCarlo { samples, seed } => {
            rho_mc(n, 1.0, samples, seed, Some(HistogramSpec { half_width, bins: 800 }))
        }
        RhoSource::Conditional { samples, seed } => {
            rho_mc_conditional(n, 1.0, samples, seed, UniformGrid::symmetric(half_width, 1601)?)
        }
    }
}

fn check_rho(m: usize, rho: &dyn OnePointDensity) -> Result<()> {
    if rho.n() != m + 1 {
        return Err(invalid(format!("need rho_{}, got rho_{}", m + 1, rho.n())));
    }
    Ok(())
}

/// Density of `mu_m` at `y`.
pub fn mu_m_density(m: usize, r: f64, y: f64, rho: &dyn OnePointDensity) -> Result<Estimate> {
    let spec = LimitMeasureSpec::new(m, r, default_grid())?;
    check_rho(m, rho)?;
    let c = y / r.sqrt();
    let phi = std_normal_pdf(y);
    let det = if spec.kappa == 0.0 {
        expected_abs_det_goe(m, 1.0, c, rho)?
    } else {
        expected_abs_det_shifted(m, 2.0 * spec.kappa, 1.0, c, rho)?.general
    };
    Ok(Estimate { value: det.value * phi, std_error: det.std_error * phi })
}

/// Closed form of the `r = 1` density,
/// `2^{(m+4)/2} Gamma((m+3)/2) exp(y^2/4) rho_{m+1,1}(y) phi(y)`.
pub fn mu_m_density_r1(m: usize, y: f64, rho: &dyn OnePointDensity) -> Result<f64> {
    check_rho(m, rho)?;
    let mf = m as f64;
    let ln = 0.5 * (mf + 4.0) * 2f64.ln() + ln_gamma(0.5 * (mf + 3.0)) + y * y / 4.0;
    Ok(ln.exp() * rho.value_at_variance(1.0, y) * std_normal_pdf(y))
}

/// `sigma_{m,r}` from the convolution formula, normalized on `grid`.
pub fn sigma_mr(m: usize, r: f64, grid: UniformGrid, rho: &dyn OnePointDensity) -> Result<Measure1D> {
    let spec = LimitMeasureSpec::new(m, r, grid)?;
    check_rho(m, rho)?;
    let w = 1.0 / r;
    let pre = Measure1D::from_density(
        grid,
        grid.points()
            .par_iter()
            .map(|&l| (-r * l * l / 4.0).exp() * rho.value_at_variance(w, l))
            .collect(),
    )?;
    let smoothed = if spec.kappa == 0.0 {
        pre
    } else {
        pre.convolve_gaussian_onto((r - 1.0) / r, grid)?
    };
    smoothed.normalize()
}

/// `sigma_{m,r}` built from the density of `mu_m`, normalized on `grid`.
pub fn sigma_mr_via_mu(m: usize, r: f64, grid: UniformGrid, rho: &dyn OnePointDensity) -> Result<Measure1D> {
    LimitMeasureSpec::new(m, r, grid)?;
    check_rho(m, rho)?;
    let values: Result<Vec<f64>> = grid
        .points()
        .par_iter()
        .map(|&y| mu_m_density(m, r, y, rho).map(|e| e.value))
        .collect();
    Measure1D::from_density(grid, values?)?.normalize()
}

/// Exponent identity behind the `r > 1` case: both sides of
/// `-(l - (t+1) y/sqrt(r))^2/(4t) - r y^2/(2(r+1))
///  = -l^2/4 - (l/sqrt(2(r-1)) - y sqrt(r/(2(r-1))))^2`, `t = (r-1)/(r+1)`,
/// returning `|lhs - rhs|` relative to the largest term (at least 1).
pub fn case1_identity_check(r: f64, lambda: f64, y: f64) -> Result<f64> {
    if !(r > 1.0 && r.is_finite()) {
        return Err(invalid(format!("identity needs r > 1, got {r}")));
    }
    let t = (r - 1.0) / (r + 1.0);
    let a = lambda - (t + 1.0) * y / r.sqrt();
    let l1 = -a * a / (4.0 * t);
    let l2 = -r * y * y / (2.0 * (r + 1.0));
    let b = lambda * (1.0 / (2.0 * (r - 1.0))).sqrt() - y * (r / (2.0 * (r - 1.0))).sqrt();
    let r1 = -lambda * lambda / 4.0;
    let r2 = -b * b;
    let scale = [l1, l2, r1, r2].iter().fold(1.0f64, |s, x| s.max(x.abs()));
    Ok(((l1 + l2) - (r1 + r2)).abs() / scale)
}

/// Right-hand side of the convolution equation for `sigma_m`: the pushforward
/// of `sigma_{m,1}` under `x -> sqrt((m+4)/(m+2)) x`, landing on `grid`.
pub fn corollary2_rhs(m: usize, grid: UniformGrid, rho: &dyn OnePointDensity) -> Result<Measure1D> {
    let t = ((m as f64 + 4.0) / (m as f64 + 2.0)).sqrt();
    let pre_grid = UniformGrid::new(grid.lo / t, grid.hi / t, grid.n)?;
    let s = sigma_mr(m, 1.0, pre_grid, rho)?;
    let pushed = s.rescale_pushforward(t)?;
    // Same node count and endpoints up to rounding; pin the grid exactly.
    Measure1D::from_density(grid, pushed.density().to_vec())
}

#[derive(Clone, Debug)]
pub struct SigmaM {
    pub measure: Measure1D,
    /// Sup-norm of `gamma_{2/(m+2)} * sigma_m - rhs` after normalization.
    pub residual: f64,
    pub clamped_mass: f64,
    pub reliable: bool,
}

/// `sigma_m` by regularized deconvolution of [`corollary2_rhs`] with variance
/// `2/(m+2)`.
pub fn sigma_m(m: usize, grid: UniformGrid, reg: f64, rho: &dyn OnePointDensity) -> Result<SigmaM> {
    let rhs = corollary2_rhs(m, grid, rho)?;
    let v = 2.0 / (m as f64 + 2.0);
    let d = rhs.deconvolve_gaussian(v, reg)?;
    let measure = d.measure.normalize()?;
    let residual = measure.convolve_gaussian_onto(v, grid)?.sup_distance(&rhs);
    Ok(SigmaM {
        measure,
        residual,
        clamped_mass: d.clamped_mass,
        reliable: residual <= crate::measure::DECONVOLUTION_RESIDUAL_LIMIT,
    })
}

/// Weighted eigenvalue measure `sum_i exp(-l_i^2/4) delta_{l_i}` over
/// `samples` draws of `GOE_{m+1}^1`, normalized: the Monte Carlo version of
/// `sigma_{m,1}`, free of binning error. Also returns the delta-method
/// standard error of its CDF at a set of checkpoints (largest value).
pub fn sigma_m1_empirical(m: usize, samples: usize, seed: u64) -> Result<(EmpiricalMeasure, f64)> {
    if m == 0 || samples < 2 {
        return Err(invalid("need m >= 1 and at least 2 samples"));
    }
    let n = m + 1;
    let checkpoints: Vec<f64> = (0..33).map(|i| -4.0 + 0.25 * i as f64).collect();
    let k = checkpoints.len();
    struct Part {
        atoms: Vec<(f64, f64)>,
        sa: Vec<f64>,
        saa: Vec<f64>,
        sab: Vec<f64>,
        sb: f64,
        sbb: f64,
    }
    let parts = par_batches(samples, 1024, seed, |rng, range| {
        let mut p = Part {
            atoms: Vec::with_capacity(range.len() * n),
            sa: vec![0.0; k],
            saa: vec![0.0; k],
            sab: vec![0.0; k],
            sb: 0.0,
            sbb: 0.0,
        };
        let mut a_s = vec![0.0; k];
        for _ in range {
            let eig = sample_goe(n, 1.0, rng).symmetric_eigenvalues();
            a_s.iter_mut().for_each(|a| *a = 0.0);
            let mut b_s = 0.0;
            for &l in eig.iter() {
                let w = (-l * l / 4.0).exp();
                if w > 0.0 && l.abs() < 16.0 {
                    p.atoms.push((l, w));
                }
                b_s += w;
                for (j, &x) in checkpoints.iter().enumerate() {
                    if l <= x {
                        a_s[j] += w;
                    }
                }
            }
            p.sb += b_s;
            p.sbb += b_s * b_s;
            for j in 0..k {
                p.sa[j] += a_s[j];
                p.saa[j] += a_s[j] * a_s[j];
                p.sab[j] += a_s[j] * b_s;
            }
        }
        p
    });
    let mut atoms = Vec::with_capacity(samples * n);
    let (mut sa, mut saa, mut sab) = (vec![0.0; k], vec![0.0; k], vec![0.0; k]);
    let (mut sb, mut sbb) = (0.0, 0.0);
    for p in parts {
        atoms.extend(p.atoms);
        for j in 0..k {
            sa[j] += p.sa[j];
            saa[j] += p.saa[j];
            sab[j] += p.sab[j];
        }
        sb += p.sb;
        sbb += p.sbb;
    }
    let noise = (0..k)
        .map(|j| {
            let ratio = sa[j] / sb;
            (saa[j] - 2.0 * ratio * sab[j] + ratio * ratio * sbb).max(0.0).sqrt() / sb
        })
        .fold(0.0, f64::max);
    let e = EmpiricalMeasure::from_atoms(atoms)?.normalize()?;
    Ok((e, noise))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianLimitEntry {
    pub m: usize,
    /// `KS(sigma_{m,1}, gamma_2)`.
    pub ks: f64,
    /// Standard error of the Monte Carlo CDF, the resolution of `ks`.
    pub noise_floor: f64,
    pub samples: usize,
}

/// `KS(sigma_{m,1}, gamma_2)` along `ms`.
pub fn gaussian_limit_report(ms: &[usize], samples: usize, seed: u64) -> Result<Vec<GaussianLimitEntry>> {
    if ms.is_empty() {
        return Err(invalid("need at least one dimension"));
    }
    ms.iter()
        .map(|&m| {
            let (e, noise) = sigma_m1_empirical(m, samples, derive_seed(seed, m as u64))?;
            let ks = ks_empirical_fn(&e, |x| centered_normal_cdf(2.0, x))?;
            Ok(GaussianLimitEntry { m, ks, noise_floor: noise, samples })
        })
        .collect()
}

/// Whether `ks` decreases strictly along the entries, allowing each step to
/// be resolved only up to twice the combined noise floors.
pub fn is_decreasing(entries: &[GaussianLimitEntry]) -> (bool, bool) {
    let strict = entries.windows(2).all(|w| w[1].ks < w[0].ks);
    let within_noise = entries
        .windows(2)
        .all(|w| w[1].ks < w[0].ks + 2.0 * w[0].noise_floor.hypot(w[1].noise_floor));
    (strict, within_noise)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RbarComparison {
    pub m: usize,
    pub c: f64,
    pub sup_error_inside: f64,
    pub max_outside: f64,
    /// Largest histogram standard error on `|x| <= c`.
    pub noise_inside: f64,
}

/// Compare `R_m(x) = sqrt(m) rho_{m+1,1}(sqrt(m) x) = rho_{m+1,1/m}(x)` with
/// the semicircle `R_inf` (`v = 1`) inside and outside `[-c, c]`.
pub fn rbar_comparison(m: usize, c: f64, samples: usize, seed: u64) -> Result<RbarComparison> {
    if !(c > 0.0 && c < 2.0) {
        return Err(invalid(format!("c must lie in (0, 2), got {c}")));
    }
    if m == 0 {
        return Err(invalid("dimension m must be >= 1"));
    }
    let sm = (m as f64).sqrt();
    let spec = HistogramSpec { half_width: 3.0 * sm, bins: 120 };
    let rho = rho_mc(m + 1, 1.0, samples, seed, Some(spec))?;
    let rbar = rescale_correlation(&rho, sm)?;
    let pts = rbar.density.points();
    let (mut inside, mut outside, mut noise) = (0.0f64, 0.0f64, 0.0f64);
    for (i, &x) in pts.iter().enumerate() {
        let diff = (rbar.density.density()[i] - semicircle_density(1.0, x)).abs();
        if x.abs() <= c {
            inside = inside.max(diff);
            noise = noise.max(rbar.std_error[i]);
        } else {
            outside = outside.max(diff);
        }
    }
    Ok(RbarComparison { m, c, sup_error_inside: inside, max_outside: outside, noise_inside: noise })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TotalMass {
    pub m: usize,
    /// `(2/(m+4))^{m/2} Gamma(1 + m/2) mu_m(R)` at `r = 1`.
    pub value: f64,
    pub ln_value: f64,
    /// Standard error (Monte Carlo) or quadrature error estimate of `value`.
    pub std_error: f64,
    pub mu_mass: f64,
}

/// Total mass constant at `r = 1`. `mu_m(R) = K (2 pi)^{-1/2} int exp(-y^2/4)
/// rho_{m+1,1}(y) dy` with `K = 2^{(m+4)/2} Gamma((m+3)/2)`; the integral is
/// done by quadrature for the exact source and as the sample mean of
/// `n^{-1} sum_i exp(-l_i^2/4)` otherwise.
pub fn limit_total_mass(m: usize, source: RhoSource) -> Result<TotalMass> {
    if m == 0 {
        return Err(invalid("dimension m must be >= 1"));
    }
    let mf = m as f64;
    let n = m + 1;
    let (integral, err) = match source {
        RhoSource::Exact => {
            let rho = ExactRho::new(n, 1.0)?;
            let q = Quadrature { abs_tol: 0.0, rel_tol: 1e-10, max_intervals: 400 };
            let res = q.integrate_real_line(|y| (-y * y / 4.0).exp() * rho.value(y), &[0.0]);
            if !res.converged {
                log::warn!("total mass quadrature for m={m} did not reach tolerance ({:e})", res.error);
            }
            (res.value, res.error)
        }
        RhoSource::MonteCarlo { samples, seed } | RhoSource::Conditional { samples, seed } => {
            let parts = par_batches(samples, 1024, seed, |rng, range| {
                let mut acc = Moments::default();
                for _ in range {
                    let eig = sample_goe(n, 1.0, rng).symmetric_eigenvalues();
                    acc.push(eig.iter().map(|l| (-l * l / 4.0).exp()).sum::<f64>() / n as f64);
                }
                acc
            });
            let mut total = Moments::default();
            parts.iter().for_each(|p| total.merge(p));
            (total.mean(), total.std_error())
        }
    };
    let ln_k = 0.5 * (mf + 4.0) * 2f64.ln() + ln_gamma(0.5 * (mf + 3.0)) - 0.5 * (2.0 * PI).ln();
    let ln_mu = ln_k + integral.ln();
    let ln_value = 0.5 * mf * (2.0 / (mf + 4.0)).ln() + ln_gamma(1.0 + 0.5 * mf) + ln_mu;
    let value = ln_value.exp();
    Ok(TotalMass { m, value, ln_value, std_error: value * err / integral, mu_mass: ln_mu.exp() })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    /// Least-squares slope of `ln C_m` against `(1/2) m ln m`.
    pub slope: f64,
    /// Least-squares slope of `ln ln C_m` against `ln((1/2) m ln m)`, when
    /// every `ln C_m` is positive.
    pub log_log_slope: Option<f64>,
}

fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

pub fn growth_fit(masses: &[TotalMass]) -> Result<GrowthFit> {
    if masses.len() < 2 {
        return Err(invalid("growth fit needs at least two dimensions"));
    }
    let xs: Vec<f64> = masses.iter().map(|t| 0.5 * t.m as f64 * (t.m as f64).ln()).collect();
    let ys: Vec<f64> = masses.iter().map(|t| t.ln_value).collect();
    let slope = ls_slope(&xs, &ys);
    let log_log_slope = if ys.iter().all(|y| *y > 0.0) && xs.iter().all(|x| *x > 0.0) {
        let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
        let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
        Some(ls_slope(&lx, &ly))
    } else {
        None
    };
    Ok(GrowthFit { slope, log_log_slope })
}

/// KS distance between the two constructions of `sigma_{m,r}`.
pub fn derivation_audit(m: usize, r: f64, grid: UniformGrid, rho: &dyn OnePointDensity) -> Result<f64> {
    let a = sigma_mr(m, r, grid, rho)?;
    let b = sigma_mr_via_mu(m, r, grid, rho)?;
    ks_distance(&a, &b)
}

/// Prefactor check used by reports: `ln K` of the determinant identity at `v = 1`.
pub fn ln_det_prefactor(m: usize) -> f64 {
    abs_det_prefactor(m, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::normal_pdf;
    use approx::assert_relative_eq;

    #[test]
    fn spec_validation() {
        let s = LimitMeasureSpec::new(2, 1.0, default_grid()).unwrap();
        assert_eq!(s.kappa, 0.0);
        let s = LimitMeasureSpec::new(2, 3.0, default_grid()).unwrap();
        assert_relative_eq!(s.tau2, s.kappa / (1.0 - s.kappa), max_relative = 1e-14);
        assert!(matches!(LimitMeasureSpec::new(2, 0.9, default_grid()), Err(Error::RequiresRAtLeastOne(_))));
    }

    #[test]
    fn r1_density_forms_agree() {
        let rho = ExactRho::new(3, 1.0).unwrap();
        for y in [0.0, 0.4, -1.3, 2.2] {
            let a = mu_m_density(2, 1.0, y, &rho).unwrap().value;
            let b = mu_m_density_r1(2, y, &rho).unwrap();
            assert!((a - b).abs() <= 1e-8 * b);
            let c = mu_m_density(2, 1.0, -y, &rho).unwrap().value;
            assert!((a - c).abs() <= 1e-12 * a.max(1e-300));
        }
        // m = 1, y = 0 from rho_{2,1}(0) = 1/(2 sqrt(2 pi)).
        let rho2 = ExactRho::new(2, 1.0).unwrap();
        let expect = 2f64.powf(2.5) * ln_gamma(2.0).exp() / (2.0 * (2.0 * PI).sqrt()) / (2.0 * PI).sqrt();
        assert_relative_eq!(mu_m_density(1, 1.0, 0.0, &rho2).unwrap().value, expect, max_relative = 1e-11);
    }

    #[test]
    fn sigma_11_closed_form() {
        let grid = default_grid();
        let rho = ExactRho::new(2, 1.0).unwrap();
        let s = sigma_mr(1, 1.0, grid, &rho).unwrap();
        assert!((s.mass() - 1.0).abs() < 1e-8);
        // Independent oracle straight from the Weyl density at v = 1:
        // rho_{2,1}(l) = int |l - t| e^{-(l^2 + t^2)/4} dt / Z_2(1), Z_2(1) = 8 sqrt(2 pi).
        let q = Quadrature::default();
        let rho21 = |l: f64| {
            q.integrate_real_line(|t| (l - t).abs() * (-(l * l + t * t) / 4.0).exp(), &[l]).value
                / (8.0 * (2.0 * PI).sqrt())
        };
        let dens = |l: f64| (-l * l / 4.0).exp() * rho21(l);
        let z = q.integrate_real_line(dens, &[0.0]).value;
        let err = grid
            .points()
            .iter()
            .zip(s.density())
            .map(|(&l, d)| (d - dens(l) / z).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-6, "sup error {err}");
    }

    #[test]
    fn case1_identity() {
        assert!(case1_identity_check(2.0, 0.3, -1.1).unwrap() <= 1e-12);
        assert!(case1_identity_check(1.0 + 1e-6, 1.0, 1.0).unwrap() <= 1e-9);
        assert_eq!(case1_identity_check(3.0, 0.0, 0.0).unwrap(), 0.0);
        assert!(case1_identity_check(1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn sigma_m_forward_consistency() {
        let grid = default_grid();
        let rho = tabulate_rho(4, RhoSource::Conditional { samples: 20_000, seed: 1 }).unwrap();
        let rhs = corollary2_rhs(4, grid, &rho).unwrap();
        assert!((rhs.mass() - 1.0).abs() < 1e-6);
        assert!(rhs.mean().abs() < 1e-8);
        let s = sigma_m(4, grid, 1e-8, &rho).unwrap();
        assert!(s.residual <= 1e-3, "residual {}", s.residual);
        assert!((s.measure.mass() - 1.0).abs() < 1e-6);
        assert!(s.measure.asymmetry() < 1e-4);
    }

    #[test]
    fn total_mass_exact_matches_monte_carlo() {
        let exact = limit_total_mass(2, RhoSource::Exact).unwrap();
        let mc = limit_total_mass(2, RhoSource::MonteCarlo { samples: 40_000, seed: 9 }).unwrap();
        assert!((exact.value - mc.value).abs() < 4.0 * mc.std_error, "{exact:?} {mc:?}");
        // mu_2(R) = E|det A| over S_2^{1,1}.
        let ens = crate::random_matrices::MatrixEnsemble::new(2, 1.0, 1.0).unwrap();
        let det = crate::random_matrices::expected_abs_det_mc(&ens, 0.0, 100_000, 4).unwrap();
        assert!((det.value - exact.mu_mass).abs() < 4.0 * det.std_error);
    }

    #[test]
    fn gaussian_reference_variance() {
        let g = Measure1D::from_fn(default_grid(), |x| normal_pdf(0.0, 2.0, x)).unwrap();
        assert!((g.variance() - 2.0).abs() < 1e-3);
    }
}
