//! Finite-dimensional Gaussian vectors and the regression formula.

use crate::error::{invalid, Error, Result};
use crate::rng::{par_batches, StreamRng, DEFAULT_BATCH};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand_distr::{Distribution, StandardNormal};
use std::f64::consts::PI;

const SYMMETRY_TOL: f64 = 1e-12;
const PSD_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct GaussianVector {
    mean: DVector<f64>,
    cov: DMatrix<f64>,
}

impl GaussianVector {
    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let n = mean.len();
        if cov.nrows() != n || cov.ncols() != n {
            return Err(invalid(format!(
                "covariance is {}x{} but mean has length {n}",
                cov.nrows(),
                cov.ncols()
            )));
        }
        if mean.iter().chain(cov.iter()).any(|x| !x.is_finite()) {
            return Err(invalid("non-finite mean or covariance entry"));
        }
        let scale = cov.amax().max(1.0);
        let asym = (&cov - cov.transpose()).amax();
        if asym > SYMMETRY_TOL * scale {
            return Err(Error::NotSymmetric(asym));
        }
        let cov = (&cov + cov.transpose()) * 0.5;
        if n > 0 {
            let eig = cov.symmetric_eigenvalues();
            let max = eig.max();
            let min = eig.min();
            if min < -PSD_TOL * max.max(0.0) {
                return Err(Error::NotPositiveSemidefinite { min, max });
            }
        }
        Ok(Self { mean, cov })
    }

    pub fn centered(cov: DMatrix<f64>) -> Result<Self> {
        Self::new(DVector::zeros(cov.nrows()), cov)
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    /// Symmetric square root `S^{1/2}` from the spectral decomposition, with
    /// slightly negative eigenvalues clamped to zero.
    pub fn sqrt_cov(&self) -> DMatrix<f64> {
        symmetric_sqrt(&self.cov)
    }

    pub fn sampler(&self) -> GaussianSampler {
        GaussianSampler { mean: self.mean.clone(), factor: self.sqrt_cov() }
    }

    /// `count` i.i.d. draws, reproducible for a fixed seed.
    pub fn sample(&self, seed: u64, count: usize) -> Result<Vec<DVector<f64>>> {
        if count == 0 {
            return Err(invalid("count must be >= 1"));
        }
        let sampler = self.sampler();
        let batches = par_batches(count, DEFAULT_BATCH, seed, |rng, range| {
            range.map(|_| sampler.draw(rng)).collect::<Vec<_>>()
        });
        Ok(batches.into_iter().flatten().collect())
    }

    /// Conditional law given `X[observed] = values` via the regression formula.
    pub fn condition(&self, observed: &[usize], values: &[f64]) -> Result<Conditioned> {
        condition(self, observed, values)
    }

    /// Log density for a nondegenerate covariance.
    pub fn log_density(&self, x: &DVector<f64>) -> Result<f64> {
        let n = self.dim();
        let chol = self
            .cov
            .clone()
            .cholesky()
            .ok_or_else(|| invalid("log density needs a positive definite covariance"))?;
        let z = x - &self.mean;
        let sol = chol.solve(&z);
        let log_det: f64 = chol.l().diagonal().iter().map(|d| 2.0 * d.ln()).sum();
        Ok(-0.5 * (n as f64 * (2.0 * PI).ln() + log_det + z.dot(&sol)))
    }
}

/// Precomputed `mean + S^{1/2} z` sampler.
#[derive(Clone, Debug)]
pub struct GaussianSampler {
    mean: DVector<f64>,
    factor: DMatrix<f64>,
}

impl GaussianSampler {
    pub fn draw(&self, rng: &mut StreamRng) -> DVector<f64> {
        let z = DVector::from_fn(self.mean.len(), |_, _| StandardNormal.sample(rng));
        &self.mean + &self.factor * z
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }
}

pub fn symmetric_sqrt(cov: &DMatrix<f64>) -> DMatrix<f64> {
    if cov.nrows() == 0 {
        return cov.clone();
    }
    let eig = SymmetricEigen::new(cov.clone());
    let roots = eig.eigenvalues.map(|l| l.max(0.0).sqrt());
    &eig.eigenvectors * DMatrix::from_diagonal(&roots) * eig.eigenvectors.transpose()
}

/// Output of [`condition`]: the conditional law of the unobserved coordinates
/// plus the condition number of the observed block.
#[derive(Clone, Debug)]
pub struct Conditioned {
    pub gaussian: GaussianVector,
    /// Indices (into the joint vector) of the free coordinates, in order.
    pub free: Vec<usize>,
    pub condition_number: f64,
}

/// Regression formula: for a joint `(X1, X2)`,
/// `X1 | X2 = x2 ~ N(m1 + C S22^{-1} (x2 - m2), S11 - C S22^{-1} C^T)`
/// with `C = Cov(X1, X2)`.
pub fn condition(joint: &GaussianVector, observed: &[usize], values: &[f64]) -> Result<Conditioned> {
    let n = joint.dim();
    if observed.len() != values.len() {
        return Err(invalid("observed indices and values differ in length"));
    }
    let mut seen = vec![false; n];
    for &i in observed {
        if i >= n || seen[i] {
            return Err(invalid(format!("bad or repeated observed index {i}")));
        }
        seen[i] = true;
    }
    let free: Vec<usize> = (0..n).filter(|&i| !seen[i]).collect();
    let s = joint.cov();
    let k = observed.len();
    let s22 = DMatrix::from_fn(k, k, |a, b| s[(observed[a], observed[b])]);
    let s11 = DMatrix::from_fn(free.len(), free.len(), |a, b| s[(free[a], free[b])]);
    let c = DMatrix::from_fn(free.len(), k, |a, b| s[(free[a], observed[b])]);
    if k == 0 {
        let mean = DVector::from_fn(free.len(), |a, _| joint.mean()[free[a]]);
        return Ok(Conditioned {
            gaussian: GaussianVector::new(mean, s11)?,
            free,
            condition_number: 1.0,
        });
    }
    let eig = s22.clone().symmetric_eigenvalues();
    let (min, max) = (eig.min(), eig.max());
    let condition_number = if min > 0.0 { max / min } else { f64::INFINITY };
    if !(condition_number < 1e12) {
        return Err(Error::SingularObservedBlock { condition_number });
    }
    let chol = s22
        .cholesky()
        .ok_or(Error::SingularObservedBlock { condition_number })?;
    // W = S22^{-1} C^T, so C S22^{-1} = W^T.
    let w = chol.solve(&c.transpose());
    let resid = DVector::from_fn(k, |b, _| values[b] - joint.mean()[observed[b]]);
    let mean = DVector::from_fn(free.len(), |a, _| joint.mean()[free[a]]) + w.transpose() * resid;
    let cov = &s11 - &c * &w;
    let cov = (&cov + cov.transpose()) * 0.5;
    let gaussian = match GaussianVector::new(mean.clone(), cov.clone()) {
        Ok(g) => g,
        Err(Error::NotPositiveSemidefinite { .. }) => {
            // Round-off pushed a singular Schur complement below zero; clamp.
            let eig = SymmetricEigen::new(cov);
            let clamped = &eig.eigenvectors
                * DMatrix::from_diagonal(&eig.eigenvalues.map(|l| l.max(0.0)))
                * eig.eigenvectors.transpose();
            GaussianVector::new(mean, (&clamped + clamped.transpose()) * 0.5)?
        }
        Err(e) => return Err(e),
    };
    Ok(Conditioned { gaussian, free, condition_number })
}

/// Density of `N(mu, v)` at `x`. The degenerate case `v = 0` is a point mass
/// and must be handled by the caller.
pub fn gaussian_density(mu: f64, v: f64, x: f64) -> Result<f64> {
    if v < 0.0 || v.is_nan() {
        return Err(invalid(format!("variance must be nonnegative, got {v}")));
    }
    if v == 0.0 {
        return Err(Error::DegenerateVariance);
    }
    Ok(crate::special::normal_pdf(mu, v, x))
}

/// Moments of the free coordinates estimated by rejection: joint draws are
/// kept when every observed coordinate lies within `eps` standard deviations
/// of its target value.
#[derive(Clone, Debug, PartialEq)]
pub struct SliceMoments {
    pub accepted: usize,
    pub mean: Vec<crate::Estimate>,
    pub variance: Vec<crate::Estimate>,
}

pub fn slice_rejection_moments(
    joint: &GaussianVector,
    observed: &[usize],
    values: &[f64],
    eps: f64,
    draws: usize,
    seed: u64,
) -> Result<SliceMoments> {
    if observed.len() != values.len() || observed.is_empty() {
        return Err(invalid("observed indices and values must be nonempty and match"));
    }
    if !(eps > 0.0) {
        return Err(invalid(format!("slice half-width must be positive, got {eps}")));
    }
    let n = joint.dim();
    let free: Vec<usize> = (0..n).filter(|i| !observed.contains(i)).collect();
    let half: Vec<f64> = observed.iter().map(|&i| eps * joint.cov()[(i, i)].sqrt()).collect();
    let sampler = joint.sampler();
    let k = free.len();
    let parts = par_batches(draws, DEFAULT_BATCH, seed, |rng, range| {
        let mut kept = vec![Vec::new(); k];
        for _ in range {
            let x = sampler.draw(rng);
            if observed.iter().zip(values).zip(&half).all(|((&i, v), h)| (x[i] - v).abs() <= *h) {
                for (j, &f) in free.iter().enumerate() {
                    kept[j].push(x[f]);
                }
            }
        }
        kept
    });
    let mut samples: Vec<Vec<f64>> = vec![Vec::new(); k];
    for kept in parts {
        for j in 0..k {
            samples[j].extend(kept[j].iter());
        }
    }
    let accepted = samples.first().map_or(0, Vec::len);
    if accepted < 10 {
        return Err(invalid(format!("only {accepted} draws fell in the slice")));
    }
    let na = accepted as f64;
    let mut mean = Vec::with_capacity(k);
    let mut variance = Vec::with_capacity(k);
    for xs in &samples {
        let mu = xs.iter().sum::<f64>() / na;
        let c2: Vec<f64> = xs.iter().map(|x| (x - mu).powi(2)).collect();
        let var = c2.iter().sum::<f64>() / (na - 1.0);
        let m4 = c2.iter().map(|c| c * c).sum::<f64>() / na;
        mean.push(crate::Estimate { value: mu, std_error: (var / na).sqrt() });
        variance.push(crate::Estimate { value: var, std_error: ((m4 - var * var).max(0.0) / na).sqrt() });
    }
    Ok(SliceMoments { accepted, mean, variance })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Moments;
    use approx::assert_relative_eq;

    #[test]
    fn rejects_bad_covariances() {
        let asym = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.4, 1.0]);
        assert!(matches!(GaussianVector::centered(asym), Err(Error::NotSymmetric(_))));
        let neg = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(matches!(GaussianVector::centered(neg), Err(Error::NotPositiveSemidefinite { .. })));
        let tiny = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0 - 1e-13]);
        assert!(GaussianVector::centered(tiny).is_ok());
    }

    #[test]
    fn sample_moments_match() {
        let g = GaussianVector::centered(DMatrix::from_diagonal_element(2, 2, 2.0)).unwrap();
        let xs = g.sample(11, 100_000).unwrap();
        for i in 0..2 {
            let mut m = Moments::default();
            xs.iter().for_each(|x| m.push(x[i] * x[i]));
            let est = m.estimate();
            assert!((est.value - 2.0).abs() < 4.0 * est.std_error, "{est:?}");
        }
        let mut c = Moments::default();
        xs.iter().for_each(|x| c.push(x[0] * x[1]));
        assert!(c.mean().abs() < 4.0 * c.std_error());
    }

    #[test]
    fn degenerate_sampling_returns_mean() {
        let mean = DVector::from_vec(vec![1.0, -2.0]);
        let g = GaussianVector::new(mean.clone(), DMatrix::zeros(2, 2)).unwrap();
        assert!(g.sample(3, 50).unwrap().iter().all(|x| *x == mean));
    }

    #[test]
    fn sampling_is_seed_deterministic() {
        let g = GaussianVector::centered(DMatrix::identity(3, 3)).unwrap();
        assert_eq!(g.sample(5, 10_000).unwrap(), g.sample(5, 10_000).unwrap());
        assert_ne!(g.sample(5, 10).unwrap(), g.sample(6, 10).unwrap());
    }

    #[test]
    fn bivariate_regression() {
        let rho = 0.5;
        let g = GaussianVector::centered(DMatrix::from_row_slice(2, 2, &[1.0, rho, rho, 1.0])).unwrap();
        let c = g.condition(&[1], &[1.3]).unwrap();
        assert_relative_eq!(c.gaussian.mean()[0], 0.65, max_relative = 1e-14);
        assert_relative_eq!(c.gaussian.cov()[(0, 0)], 0.75, max_relative = 1e-14);
        assert_eq!(c.free, vec![0]);
        let c2 = g.condition(&[1], &[-7.0]).unwrap();
        assert_eq!(c.gaussian.cov(), c2.gaussian.cov());
        let ind = GaussianVector::centered(DMatrix::identity(2, 2)).unwrap();
        let c = ind.condition(&[1], &[4.0]).unwrap();
        assert_eq!(c.gaussian.mean()[0], 0.0);
        assert_eq!(c.gaussian.cov()[(0, 0)], 1.0);
    }

    #[test]
    fn singular_block_reports_condition_number() {
        let g = GaussianVector::centered(DMatrix::from_row_slice(
            3,
            3,
            &[1.0, 0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 1.0, 1.0],
        ))
        .unwrap();
        match g.condition(&[1, 2], &[0.0, 0.0]) {
            Err(Error::SingularObservedBlock { condition_number }) => assert!(condition_number > 1e12),
            other => panic!("expected singular block error, got {other:?}"),
        }
    }

    #[test]
    fn scalar_density() {
        assert_relative_eq!(gaussian_density(0.0, 1.0, 0.0).unwrap(), 0.398_942_280_401_432_7, max_relative = 1e-14);
        assert!(gaussian_density(0.0, -1.0, 0.0).is_err());
        assert!(matches!(gaussian_density(0.0, 0.0, 0.0), Err(Error::DegenerateVariance)));
        assert_relative_eq!(
            gaussian_density(1.5, 0.7, 1.5 + 0.6).unwrap(),
            gaussian_density(1.5, 0.7, 1.5 - 0.6).unwrap(),
            max_relative = 1e-14
        );
        let q = crate::quadrature::Quadrature::default();
        let r = q.integrate_real_line(|x| gaussian_density(0.3, 2.5, x).unwrap(), &[0.3]);
        assert_relative_eq!(r.value, 1.0, max_relative = 1e-12);
    }
}
