//! Gaussian ensembles of real symmetric matrices.
//!
//! `S_m^{u,v}` is the centered Gaussian ensemble of `m x m` symmetric matrices
//! with `E(a_ij a_kl) = u d_ij d_kl + v (d_ik d_jl + d_il d_jk)`; `GOE_m^v` is
//! the case `u = 0`. Valid parameters satisfy `v > 0` and `m u + 2 v > 0`.

mod correlation;
mod determinant;
mod weyl;

pub use correlation::{
    rescale_correlation, rho_exact, rho_exact_at, rho_mc, rho_mc_conditional, CorrelationFunction, ExactRho,
    HistogramSpec, OnePointDensity, RhoMethod, EXACT_MAX_N,
};
pub use determinant::{
    abs_det_prefactor, expected_abs_det_goe, expected_abs_det_goe_exact, expected_abs_det_mc,
    expected_abs_det_shifted, ShiftedDeterminant,
};
pub use weyl::weyl_integrand;

use crate::error::{invalid, Result};
use crate::gaussian::{GaussianSampler, GaussianVector};
use crate::rng::StreamRng;
use crate::quadrature::Quadrature;
use crate::special::{ln_factorial, ln_gamma};
use nalgebra::DMatrix;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixEnsemble {
    pub m: usize,
    pub u: f64,
    pub v: f64,
}

impl MatrixEnsemble {
    pub fn new(m: usize, u: f64, v: f64) -> Result<Self> {
        if m == 0 {
            return Err(invalid("matrix size must be >= 1"));
        }
        if !(v > 0.0 && v.is_finite() && u.is_finite()) {
            return Err(invalid(format!("ensemble needs v > 0, got v = {v}")));
        }
        if !(m as f64 * u + 2.0 * v > 0.0) {
            return Err(invalid(format!("ensemble needs m u + 2 v > 0, got m = {m}, u = {u}, v = {v}")));
        }
        Ok(Self { m, u, v })
    }

    pub fn goe(m: usize, v: f64) -> Result<Self> {
        Self::new(m, 0.0, v)
    }

    /// Number of independent coordinates `a_ij`, `i <= j`.
    pub fn coordinate_count(&self) -> usize {
        self.m * (self.m + 1) / 2
    }

    /// Upper-triangular coordinates in row-major order.
    pub fn coordinates(&self) -> Vec<(usize, usize)> {
        (0..self.m).flat_map(|i| (i..self.m).map(move |j| (i, j))).collect()
    }

    /// Covariance of the raw entries `a_ij`, `i <= j`.
    pub fn entry_covariance(&self) -> DMatrix<f64> {
        let idx = self.coordinates();
        let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
        DMatrix::from_fn(idx.len(), idx.len(), |p, q| {
            let (i, j) = idx[p];
            let (k, l) = idx[q];
            self.u * d(i, j) * d(k, l) + self.v * (d(i, k) * d(j, l) + d(i, l) * d(j, k))
        })
    }

    /// Coordinates orthonormal for `<A, B> = tr(AB)`: `a_ii` and `sqrt(2) a_ij`.
    pub fn orthonormal_coordinates(&self, a: &DMatrix<f64>) -> Vec<f64> {
        self.coordinates()
            .into_iter()
            .map(|(i, j)| if i == j { a[(i, j)] } else { std::f64::consts::SQRT_2 * a[(i, j)] })
            .collect()
    }

    pub fn sampler(&self) -> Result<MatrixSampler> {
        if self.u >= 0.0 {
            Ok(MatrixSampler::Decomposed { ens: *self })
        } else {
            let g = GaussianVector::centered(self.entry_covariance())?;
            Ok(MatrixSampler::Full { ens: *self, sampler: g.sampler() })
        }
    }

    /// One matrix drawn from stream 0 of `seed`.
    pub fn sample_matrix(&self, seed: u64) -> Result<DMatrix<f64>> {
        let mut rng = crate::rng::stream(seed, 0);
        Ok(self.sampler()?.draw(&mut rng))
    }

    /// `ln det` of the covariance in orthonormal coordinates,
    /// `(m-1 + m(m-1)/2) ln(2v) + ln(m u + 2v)`.
    pub fn ln_covariance_det(&self) -> f64 {
        let m = self.m as f64;
        (m - 1.0 + m * (m - 1.0) / 2.0) * (2.0 * self.v).ln() + (m * self.u + 2.0 * self.v).ln()
    }

    /// Log density with respect to Lebesgue measure in orthonormal coordinates:
    /// `-(M/2) ln(2 pi) - ln(D)/2 - tr(A^2)/(4v) + u tr(A)^2 / (4v(mu + 2v))`.
    pub fn log_density(&self, a: &DMatrix<f64>) -> f64 {
        let m = self.m as f64;
        let dim = self.coordinate_count() as f64;
        let tr = a.trace();
        let tr_sq = a.iter().map(|x| x * x).sum::<f64>();
        -0.5 * dim * (2.0 * PI).ln() - 0.5 * self.ln_covariance_det() - tr_sq / (4.0 * self.v)
            + self.u * tr * tr / (4.0 * self.v * (m * self.u + 2.0 * self.v))
    }
}

/// Sampler for `S_m^{u,v}`: `B + X 1` with `B ~ GOE_m^v` and `X ~ N(0, u)` for
/// `u >= 0`, or the full entrywise Gaussian for `u < 0`.
#[derive(Clone, Debug)]
pub enum MatrixSampler {
    Decomposed { ens: MatrixEnsemble },
    Full { ens: MatrixEnsemble, sampler: GaussianSampler },
}

impl MatrixSampler {
    pub fn draw(&self, rng: &mut StreamRng) -> DMatrix<f64> {
        match self {
            MatrixSampler::Decomposed { ens } => {
                let mut a = sample_goe(ens.m, ens.v, rng);
                if ens.u > 0.0 {
                    let z: f64 = StandardNormal.sample(rng);
                    let x = ens.u.sqrt() * z;
                    for i in 0..ens.m {
                        a[(i, i)] += x;
                    }
                }
                a
            }
            MatrixSampler::Full { ens, sampler } => {
                let z = sampler.draw(rng);
                let mut a = DMatrix::zeros(ens.m, ens.m);
                for (p, (i, j)) in ens.coordinates().into_iter().enumerate() {
                    a[(i, j)] = z[p];
                    a[(j, i)] = z[p];
                }
                a
            }
        }
    }
}

/// `GOE_m^v`: independent entries, `var(a_ii) = 2v`, `var(a_ij) = v`.
pub fn sample_goe(m: usize, v: f64, rng: &mut StreamRng) -> DMatrix<f64> {
    let off = Normal::new(0.0, v.sqrt()).expect("v > 0");
    let diag = Normal::new(0.0, (2.0 * v).sqrt()).expect("v > 0");
    let mut a = DMatrix::zeros(m, m);
    for i in 0..m {
        a[(i, i)] = diag.sample(rng);
        for j in i + 1..m {
            let x = off.sample(rng);
            a[(i, j)] = x;
            a[(j, i)] = x;
        }
    }
    a
}

/// `ln Z_m` with `Z_m = 2^{m/2} m! prod_{j=1}^m Gamma(j/2)`, the integral of
/// `prod_{i<j} |l_i - l_j| exp(-sum l_i^2 / 2)` over `R^m`.
pub fn ln_selberg_z(m: u32) -> Result<f64> {
    if m == 0 || m > 200 {
        return Err(invalid(format!("selberg constant needs 1 <= m <= 200, got {m}")));
    }
    let mf = m as f64;
    let sum: f64 = (1..=m).map(|j| ln_gamma(j as f64 / 2.0)).sum();
    Ok(0.5 * mf * 2f64.ln() + ln_factorial(m) + sum)
}

pub fn selberg_z(m: u32) -> Result<f64> {
    let ln = ln_selberg_z(m)?;
    if ln > f64::MAX.ln() {
        return Err(crate::Error::Overflow(ln));
    }
    Ok(ln.exp())
}

/// `Z_m` by nested adaptive quadrature of the Weyl integrand over the ordered
/// chamber `l_1 < ... < l_m` (times `m!`), truncated to `|l_i| <= 14`.
/// Independent of the closed form. Supports `m <= 4`.
pub fn selberg_z_quadrature(m: u32, rel_tol: f64) -> Result<f64> {
    if m == 0 || m > 4 {
        return Err(invalid(format!("quadrature check supports 1 <= m <= 4, got {m}")));
    }
    const CUT: f64 = 14.0;
    fn level(depth: usize, m: usize, lambda: &mut [f64; 4], lo: f64, q: &Quadrature) -> f64 {
        if depth == m {
            return weyl_integrand(&lambda[..m], 0.5);
        }
        if lo >= CUT {
            return 0.0;
        }
        let f = |x: f64| {
            let mut l = *lambda;
            l[depth] = x;
            level(depth + 1, m, &mut l, x, q)
        };
        q.integrate(f, lo, CUT).value
    }
    let q = Quadrature { abs_tol: 0.0, rel_tol, max_intervals: 200 };
    let mut lambda = [0.0; 4];
    let chamber = level(0, m as usize, &mut lambda, -CUT, &q);
    Ok(chamber * (1..=m).product::<u32>() as f64)
}

/// `ln Z_m(v) = (m(m+1)/4) ln(2v) + ln Z_m`, the normalization for weight
/// `exp(-sum l_i^2 / (4v))`.
pub fn ln_selberg_z_v(m: u32, v: f64) -> Result<f64> {
    if !(v > 0.0) {
        return Err(invalid(format!("v must be positive, got {v}")));
    }
    let mf = m as f64;
    Ok(mf * (mf + 1.0) / 4.0 * (2.0 * v).ln() + ln_selberg_z(m)?)
}

/// Semicircle density `(2 pi v)^{-1} sqrt(4v - x^2)` on `|x| <= 2 sqrt(v)`.
pub fn semicircle_density(v: f64, x: f64) -> f64 {
    let r = 4.0 * v - x * x;
    if r <= 0.0 {
        0.0
    } else {
        r.sqrt() / (2.0 * PI * v)
    }
}

/// Semicircle CDF.
pub fn semicircle_cdf(v: f64, x: f64) -> f64 {
    let r = 2.0 * v.sqrt();
    if x <= -r {
        return 0.0;
    }
    if x >= r {
        return 1.0;
    }
    let t = x / r;
    0.5 + (t * (1.0 - t * t).sqrt() + t.asin()) / PI
}
