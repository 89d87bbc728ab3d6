//! One-point correlation functions `rho_{n,v}`: the normalised expected
//! eigenvalue density of `GOE_n^v`.

use super::weyl::j_n_cached;
use super::{ln_selberg_z, sample_goe};
use crate::error::{invalid, Result};
use crate::measure::{histogram_measure, Measure1D, UniformGrid};
use crate::rng::{par_batches, DEFAULT_BATCH};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Largest size handled by nested quadrature.
pub const EXACT_MAX_N: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RhoMethod {
    ExactQuadrature,
    MonteCarlo,
    ConditionalMonteCarlo,
}

/// A one-point function that can be evaluated at any variance through the
/// rescaling identity `c rho_{n, c^2 v}(c y) = rho_{n,v}(y)`.
pub trait OnePointDensity: Sync {
    fn n(&self) -> usize;
    fn v(&self) -> f64;
    fn value(&self, x: f64) -> f64;
    fn std_error(&self, _x: f64) -> f64 {
        0.0
    }

    /// `rho_{n,w}(x)`.
    fn value_at_variance(&self, w: f64, x: f64) -> f64 {
        let c = (self.v() / w).sqrt();
        c * self.value(c * x)
    }

    fn std_error_at_variance(&self, w: f64, x: f64) -> f64 {
        let c = (self.v() / w).sqrt();
        c * self.std_error(c * x)
    }
}

/// Pointwise exact `rho_{n,v}` for `n <= 4`.
#[derive(Clone, Copy, Debug)]
pub struct ExactRho {
    n: usize,
    v: f64,
    ln_z: f64,
}

impl ExactRho {
    pub fn new(n: usize, v: f64) -> Result<Self> {
        if n == 0 || n > EXACT_MAX_N {
            return Err(invalid(format!(
                "exact one-point function needs 1 <= n <= {EXACT_MAX_N}, got {n}; use rho_mc"
            )));
        }
        if !(v > 0.0 && v.is_finite()) {
            return Err(invalid(format!("v must be positive, got {v}")));
        }
        Ok(Self { n, v, ln_z: ln_selberg_z(n as u32)? })
    }
}

impl OnePointDensity for ExactRho {
    fn n(&self) -> usize {
        self.n
    }

    fn v(&self) -> f64 {
        self.v
    }

    fn value(&self, x: f64) -> f64 {
        // rho_{n,v}(x) = rho_{n,1/2}(x / sqrt(2v)) / sqrt(2v); even in x.
        let scale = (2.0 * self.v).sqrt();
        let s = (x / scale).abs();
        let j = j_n_cached(self.n, s);
        if j <= 0.0 {
            return 0.0;
        }
        (j.ln() - 0.5 * s * s - self.ln_z).exp() / scale
    }
}

/// `rho_{n,v}(x)` at a single point.
pub fn rho_exact_at(n: usize, v: f64, x: f64) -> Result<f64> {
    Ok(ExactRho::new(n, v)?.value(x))
}

/// A one-point function tabulated on a grid, with per-node standard errors
/// for Monte Carlo estimates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationFunction {
    pub n: usize,
    pub v: f64,
    pub method: RhoMethod,
    pub density: Measure1D,
    pub std_error: Vec<f64>,
    pub samples: usize,
}

impl CorrelationFunction {
    pub fn mass(&self) -> f64 {
        self.density.mass()
    }

    /// Largest per-node standard error.
    pub fn max_std_error(&self) -> f64 {
        self.std_error.iter().copied().fold(0.0, f64::max)
    }

    fn interpolate(&self, values: &[f64], x: f64) -> f64 {
        let g = self.density.grid();
        if !(x >= g.lo && x <= g.hi) {
            return 0.0;
        }
        let pos = (x - g.lo) / g.step();
        let i = (pos.floor() as usize).min(g.n - 2);
        let t = pos - i as f64;
        values[i] * (1.0 - t) + values[i + 1] * t
    }
}

impl OnePointDensity for CorrelationFunction {
    fn n(&self) -> usize {
        self.n
    }

    fn v(&self) -> f64 {
        self.v
    }

    fn value(&self, x: f64) -> f64 {
        self.density.density_at(x)
    }

    fn std_error(&self, x: f64) -> f64 {
        if self.std_error.is_empty() {
            0.0
        } else {
            self.interpolate(&self.std_error, x)
        }
    }
}

/// Exact `rho_{n,v}` on `grid` by adaptive quadrature (`n <= 4`).
pub fn rho_exact(n: usize, v: f64, grid: UniformGrid) -> Result<CorrelationFunction> {
    let rho = ExactRho::new(n, v)?;
    let pts = grid.points();
    let mut values: Vec<f64> = vec![0.0; grid.n];
    if grid.is_symmetric() {
        // Evaluate the nonnegative half and mirror it, which makes the tabulated
        // function exactly even.
        let half: Vec<usize> = (0..grid.n).filter(|&i| i >= grid.mirror(i)).collect();
        let vals: Vec<f64> = half.par_iter().map(|&i| rho.value(pts[i])).collect();
        for (&i, val) in half.iter().zip(vals) {
            values[i] = val;
            values[grid.mirror(i)] = val;
        }
    } else {
        values = pts.par_iter().map(|&x| rho.value(x)).collect();
    }
    Ok(CorrelationFunction {
        n,
        v,
        method: RhoMethod::ExactQuadrature,
        density: Measure1D::from_density(grid, values)?,
        std_error: Vec::new(),
        samples: 0,
    })
}

/// Histogram layout for [`rho_mc`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistogramSpec {
    pub half_width: f64,
    pub bins: usize,
}

impl HistogramSpec {
    /// 200 bins over `[-w, w]` with `w = max(4 sqrt(n v), 6 sqrt(2 v))`; the
    /// second term keeps the Gaussian tails of very small matrices in range.
    pub fn default_for(n: usize, v: f64) -> Self {
        let w = (4.0 * (n as f64 * v).sqrt()).max(6.0 * (2.0 * v).sqrt());
        Self { half_width: w, bins: 200 }
    }
}

/// Monte Carlo `rho_{n,v}`: histogram of all eigenvalues of `n_samples`
/// matrices from `GOE_n^v`, symmetrised about 0. Nodes sit at bin centres with
/// zero end nodes, so the tabulated mass equals the in-range fraction.
pub fn rho_mc(
    n: usize,
    v: f64,
    n_samples: usize,
    seed: u64,
    spec: Option<HistogramSpec>,
) -> Result<CorrelationFunction> {
    if n == 0 {
        return Err(invalid("matrix size must be >= 1"));
    }
    if !(v > 0.0 && v.is_finite()) {
        return Err(invalid(format!("v must be positive, got {v}")));
    }
    if n_samples < 2 {
        return Err(invalid("rho_mc needs at least 2 samples"));
    }
    let spec = spec.unwrap_or_else(|| HistogramSpec::default_for(n, v));
    if spec.bins == 0 || !(spec.half_width > 0.0) {
        return Err(invalid("histogram needs bins >= 1 and positive half width"));
    }
    let (lo, hi, bins) = (-spec.half_width, spec.half_width, spec.bins);
    let width = (hi - lo) / bins as f64;
    let half = bins.div_ceil(2);
    let batch = (DEFAULT_BATCH / n.max(1)).max(64);
    // Per batch: sums of symmetrised per-matrix bin counts and of their squares.
    let parts = par_batches(n_samples, batch, seed, |rng, range| {
        let mut sum = vec![0.0; half];
        let mut sum_sq = vec![0.0; half];
        let mut counts = vec![0u32; bins];
        for _ in range {
            counts.iter_mut().for_each(|c| *c = 0);
            let eig = sample_goe(n, v, rng).symmetric_eigenvalues();
            for &x in eig.iter() {
                if x >= lo && x < hi {
                    counts[(((x - lo) / width) as usize).min(bins - 1)] += 1;
                }
            }
            for b in 0..half {
                let s = 0.5 * (counts[b] + counts[bins - 1 - b]) as f64;
                sum[b] += s;
                sum_sq[b] += s * s;
            }
        }
        (sum, sum_sq)
    });
    let mut sum = vec![0.0; half];
    let mut sum_sq = vec![0.0; half];
    for (s, q) in &parts {
        for b in 0..half {
            sum[b] += s[b];
            sum_sq[b] += q[b];
        }
    }
    let ns = n_samples as f64;
    let total = ns * n as f64;
    let mut counts = vec![0.0; bins];
    let mut se = vec![0.0; bins + 2];
    for b in 0..half {
        counts[b] = sum[b];
        counts[bins - 1 - b] = sum[b];
        let mean = sum[b] / ns;
        let var = ((sum_sq[b] - ns * mean * mean) / (ns - 1.0)).max(0.0);
        let e = (var / ns).sqrt() / (n as f64 * width);
        se[b + 1] = e;
        se[bins - b] = e;
    }
    let density = histogram_measure(lo, hi, &counts, total)?;
    let out = CorrelationFunction {
        n,
        v,
        method: RhoMethod::MonteCarlo,
        density,
        std_error: se,
        samples: n_samples,
    };
    let centre = out.value(0.0);
    let centre_se = out.std_error(0.0);
    if centre > 0.0 && centre_se / centre > 0.05 {
        log::warn!(
            "rho_mc(n={n}): {n_samples} samples give relative standard error {:.3} at the centre bin",
            centre_se / centre
        );
    }
    Ok(out)
}

/// Smooth Monte Carlo `rho_{n,v}` on `grid`.
///
/// A draw `G ~ GOE_n^v` splits as `B + (tr G / n) 1` where the traceless part
/// `B` is independent of `tr G / n ~ N(0, 2v/n)`. Integrating the trace out
/// exactly gives `rho_{n,v}(x) = n^{-1} E sum_i p_{2v/n}(x - b_i)` over the
/// eigenvalues `b_i` of `B`: an unbiased Gaussian-mixture estimator that needs
/// no binning and is smooth on the scale `sqrt(2v/n)`.
pub fn rho_mc_conditional(
    n: usize,
    v: f64,
    n_samples: usize,
    seed: u64,
    grid: UniformGrid,
) -> Result<CorrelationFunction> {
    if n == 0 {
        return Err(invalid("matrix size must be >= 1"));
    }
    if !(v > 0.0 && v.is_finite()) {
        return Err(invalid(format!("v must be positive, got {v}")));
    }
    if n_samples < 2 {
        return Err(invalid("rho_mc_conditional needs at least 2 samples"));
    }
    let g = grid.n;
    let dx = grid.step();
    let s = 2.0 * v / n as f64;
    let reach = 9.0 * s.sqrt();
    let norm = 1.0 / (n as f64 * (2.0 * std::f64::consts::PI * s).sqrt());
    let batch = (DEFAULT_BATCH / n.max(1)).max(64);
    let parts = par_batches(n_samples, batch, seed, |rng, range| {
        let mut sum = vec![0.0; g];
        let mut sum_sq = vec![0.0; g];
        let mut val = vec![0.0; g];
        for _ in range {
            let eig = sample_goe(n, v, rng).symmetric_eigenvalues();
            let mean = eig.mean();
            let (mut first, mut last) = (g, 0usize);
            for &e in eig.iter() {
                let b = e - mean;
                let i0 = (((b - reach - grid.lo) / dx).ceil().max(0.0)) as usize;
                let i1 = (((b + reach - grid.lo) / dx).floor().min((g - 1) as f64)).max(-1.0);
                if i1 < 0.0 || i0 >= g {
                    continue;
                }
                let i1 = i1 as usize;
                for (i, slot) in val.iter_mut().enumerate().take(i1 + 1).skip(i0) {
                    let z = grid.lo + i as f64 * dx - b;
                    *slot += norm * (-(z * z) / (2.0 * s)).exp();
                }
                first = first.min(i0);
                last = last.max(i1);
            }
            if first <= last {
                for i in first..=last {
                    sum[i] += val[i];
                    sum_sq[i] += val[i] * val[i];
                    val[i] = 0.0;
                }
            }
        }
        (sum, sum_sq)
    });
    let mut sum = vec![0.0; g];
    let mut sum_sq = vec![0.0; g];
    for (s, q) in &parts {
        for i in 0..g {
            sum[i] += s[i];
            sum_sq[i] += q[i];
        }
    }
    let ns = n_samples as f64;
    let mut mean: Vec<f64> = sum.iter().map(|s| s / ns).collect();
    let mut se: Vec<f64> = sum
        .iter()
        .zip(&sum_sq)
        .map(|(s, q)| {
            let m = s / ns;
            (((q - ns * m * m) / (ns - 1.0)).max(0.0) / ns).sqrt()
        })
        .collect();
    if grid.is_symmetric() {
        for i in 0..g / 2 {
            let j = grid.mirror(i);
            let avg = 0.5 * (mean[i] + mean[j]);
            mean[i] = avg;
            mean[j] = avg;
            let e = se[i].max(se[j]);
            se[i] = e;
            se[j] = e;
        }
    }
    Ok(CorrelationFunction {
        n,
        v,
        method: RhoMethod::ConditionalMonteCarlo,
        density: Measure1D::from_density(grid, mean)?,
        std_error: se,
        samples: n_samples,
    })
}

/// The density `y -> c rho(c y)`, i.e. the one-point function at variance
/// `v / c^2` when `rho` is at variance `v`.
pub fn rescale_correlation(rho: &CorrelationFunction, c: f64) -> Result<CorrelationFunction> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(invalid(format!("rescaling constant must be positive, got {c}")));
    }
    Ok(CorrelationFunction {
        n: rho.n,
        v: rho.v / (c * c),
        method: rho.method,
        density: rho.density.rescale_pushforward(1.0 / c)?,
        std_error: rho.std_error.iter().map(|e| e * c).collect(),
        samples: rho.samples,
    })
}
