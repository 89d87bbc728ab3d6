//! Finite measures on the real line.
//!
//! [`Measure1D`] stores density values on a uniform grid and is understood as
//! the piecewise-linear interpolant of those values (zero outside the grid), so
//! its trapezoid mass and its CDF are exact for that interpolant.
//! [`EmpiricalMeasure`] is a finite sum of weighted atoms.

use crate::error::{invalid, Error, Result};
use crate::quadrature::trapezoid;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use std::io::Write;

/// Tolerance on the mass of inputs that must be probability measures.
pub const PROBABILITY_TOL: f64 = 1e-6;
/// Forward residual above which a deconvolution is flagged unreliable.
pub const DECONVOLUTION_RESIDUAL_LIMIT: f64 = 1e-3;
pub const DEFAULT_DECONVOLUTION_REG: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniformGrid {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl UniformGrid {
    pub fn new(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && hi > lo) {
            return Err(invalid(format!("grid needs finite lo < hi, got [{lo}, {hi}]")));
        }
        if n < 2 {
            return Err(invalid(format!("grid needs at least 2 points, got {n}")));
        }
        Ok(Self { lo, hi, n })
    }

    /// Symmetric grid `[-half_width, half_width]`.
    pub fn symmetric(half_width: f64, n: usize) -> Result<Self> {
        Self::new(-half_width, half_width, n)
    }

    pub fn step(&self) -> f64 {
        (self.hi - self.lo) / (self.n - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.n {
            self.hi
        } else {
            self.lo + i as f64 * self.step()
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.point(i)).collect()
    }

    /// Grid point reflected through the origin, `x_i -> x_{n-1-i}`; exact for
    /// symmetric grids.
    pub fn mirror(&self, i: usize) -> usize {
        self.n - 1 - i
    }

    pub fn is_symmetric(&self) -> bool {
        (self.lo + self.hi).abs() <= 1e-14 * self.hi.abs()
    }

    /// The same grid extended by `k` steps on each side.
    pub fn extended(&self, k: usize) -> Self {
        let dx = self.step();
        Self { lo: self.lo - k as f64 * dx, hi: self.hi + k as f64 * dx, n: self.n + 2 * k }
    }
}

/// Density on a uniform grid plus its trapezoid mass.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Measure1D {
    lo: f64,
    hi: f64,
    n_grid: usize,
    mass: f64,
    density: Vec<f64>,
}

impl Measure1D {
    pub fn from_density(grid: UniformGrid, density: Vec<f64>) -> Result<Self> {
        if density.len() != grid.n {
            return Err(invalid(format!(
                "density has {} values for a grid of {} points",
                density.len(),
                grid.n
            )));
        }
        if let Some(bad) = density.iter().find(|d| !(d.is_finite() && **d >= 0.0)) {
            return Err(invalid(format!("density values must be finite and nonnegative, found {bad}")));
        }
        let mass = trapezoid(&density, grid.step());
        Ok(Self { lo: grid.lo, hi: grid.hi, n_grid: grid.n, mass, density })
    }

    pub fn from_fn(grid: UniformGrid, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_density(grid, grid.points().into_iter().map(f).collect())
    }

    /// Gaussian `N(0, v)` on `grid`.
    pub fn gaussian(grid: UniformGrid, v: f64) -> Result<Self> {
        if !(v > 0.0) {
            return Err(Error::DegenerateVariance);
        }
        Self::from_fn(grid, |x| crate::special::normal_pdf(0.0, v, x))
    }

    pub fn grid(&self) -> UniformGrid {
        UniformGrid { lo: self.lo, hi: self.hi, n: self.n_grid }
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn points(&self) -> Vec<f64> {
        self.grid().points()
    }

    pub fn normalize(&self) -> Result<Self> {
        if !(self.mass > 0.0) {
            return Err(Error::ZeroMass);
        }
        let inv = 1.0 / self.mass;
        Self::from_density(self.grid(), self.density.iter().map(|d| d * inv).collect())
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::from_density(self.grid(), self.density.iter().map(|d| d * factor).collect())
    }

    pub fn is_probability(&self) -> bool {
        (self.mass - 1.0).abs() <= PROBABILITY_TOL
    }

    fn require_probability(&self) -> Result<()> {
        if self.is_probability() {
            Ok(())
        } else {
            Err(Error::Unnormalized(self.mass))
        }
    }

    /// Piecewise-linear density value, zero outside the grid.
    pub fn density_at(&self, x: f64) -> f64 {
        if !(x >= self.lo && x <= self.hi) {
            return 0.0;
        }
        let dx = self.grid().step();
        let pos = (x - self.lo) / dx;
        let i = (pos.floor() as usize).min(self.n_grid - 2);
        let t = pos - i as f64;
        self.density[i] * (1.0 - t) + self.density[i + 1] * t
    }

    /// Cumulative mass at every grid node.
    pub fn cumulative(&self) -> Vec<f64> {
        let dx = self.grid().step();
        let mut out = Vec::with_capacity(self.n_grid);
        let mut acc = 0.0;
        out.push(0.0);
        for w in self.density.windows(2) {
            acc += 0.5 * dx * (w[0] + w[1]);
            out.push(acc);
        }
        out
    }

    /// Unnormalized CDF of the interpolant at an arbitrary point.
    pub fn cdf_at(&self, x: f64, cumulative: &[f64]) -> f64 {
        if x <= self.lo {
            return 0.0;
        }
        if x >= self.hi {
            return self.mass;
        }
        let dx = self.grid().step();
        let pos = (x - self.lo) / dx;
        let i = (pos.floor() as usize).min(self.n_grid - 2);
        let t = x - (self.lo + i as f64 * dx);
        let (f0, f1) = (self.density[i], self.density[i + 1]);
        cumulative[i] + f0 * t + (f1 - f0) * t * t / (2.0 * dx)
    }

    pub fn moment(&self, k: i32) -> f64 {
        let pts = self.points();
        let vals: Vec<f64> = pts.iter().zip(&self.density).map(|(x, d)| x.powi(k) * d).collect();
        trapezoid(&vals, self.grid().step())
    }

    pub fn mean(&self) -> f64 {
        self.moment(1) / self.mass
    }

    pub fn variance(&self) -> f64 {
        let mu = self.mean();
        self.moment(2) / self.mass - mu * mu
    }

    /// Largest `|f(x) - f(-x)|` over the grid, for symmetric grids.
    pub fn asymmetry(&self) -> f64 {
        (0..self.n_grid)
            .map(|i| (self.density[i] - self.density_at(-self.grid().point(i))).abs())
            .fold(0.0, f64::max)
    }

    /// Linear interpolation onto another grid.
    pub fn resample(&self, grid: UniformGrid) -> Result<Self> {
        Self::from_fn(grid, |x| self.density_at(x))
    }

    /// Sup-norm distance between densities, evaluated on this measure's grid.
    pub fn sup_distance(&self, other: &Measure1D) -> f64 {
        self.points()
            .iter()
            .zip(&self.density)
            .map(|(&x, d)| (d - other.density_at(x)).abs())
            .fold(0.0, f64::max)
    }

    /// Pushforward under `x -> t x`.
    pub fn rescale_pushforward(&self, t: f64) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(invalid(format!("rescaling factor must be positive, got {t}")));
        }
        let grid = UniformGrid::new(self.lo * t, self.hi * t, self.n_grid)?;
        Self::from_density(grid, self.density.iter().map(|d| d / t).collect())
    }

    /// Whether the grid resolves a Gaussian of variance `v` (spacing at most
    /// `sqrt(v)/4`).
    pub fn resolves_variance(&self, v: f64) -> bool {
        self.grid().step() <= v.sqrt() / 4.0
    }

    /// `gamma_v * self` on the grid enlarged by `8 sqrt(v)` on both sides.
    /// `v = 0` is the point mass at the origin and returns the input.
    pub fn convolve_gaussian(&self, v: f64) -> Result<Self> {
        if v < 0.0 || v.is_nan() {
            return Err(invalid(format!("variance must be nonnegative, got {v}")));
        }
        if v == 0.0 {
            return Ok(self.clone());
        }
        let dx = self.grid().step();
        let k = (8.0 * v.sqrt() / dx).ceil() as usize;
        self.convolve_gaussian_onto(v, self.grid().extended(k))
    }

    /// `gamma_v * self` evaluated on an arbitrary target grid.
    pub fn convolve_gaussian_onto(&self, v: f64, target: UniformGrid) -> Result<Self> {
        if v < 0.0 || v.is_nan() {
            return Err(invalid(format!("variance must be nonnegative, got {v}")));
        }
        if v == 0.0 {
            return self.resample(target);
        }
        if !self.resolves_variance(v) {
            log::warn!(
                "grid spacing {} is coarse for gaussian variance {v} (sqrt(v)/4 = {})",
                self.grid().step(),
                v.sqrt() / 4.0
            );
        }
        let src = self.points();
        let dx = self.grid().step();
        let weights: Vec<f64> = self
            .density
            .iter()
            .enumerate()
            .map(|(j, d)| if j == 0 || j + 1 == self.n_grid { 0.5 * d * dx } else { d * dx })
            .collect();
        let reach = 12.0 * v.sqrt();
        let density = target
            .points()
            .iter()
            .map(|&y| {
                let mut acc = 0.0;
                for (x, w) in src.iter().zip(&weights) {
                    let z = y - x;
                    if *w != 0.0 && z.abs() <= reach {
                        acc += w * (-(z * z) / (2.0 * v)).exp();
                    }
                }
                acc / (2.0 * std::f64::consts::PI * v).sqrt()
            })
            .collect();
        Self::from_density(target, density)
    }

    /// Regularized Fourier inverse of [`Measure1D::convolve_gaussian`].
    pub fn deconvolve_gaussian(&self, v: f64, reg: f64) -> Result<Deconvolution> {
        if v < 0.0 || v.is_nan() {
            return Err(invalid(format!("variance must be nonnegative, got {v}")));
        }
        if !(reg > 0.0) {
            return Err(invalid(format!("regularization must be positive, got {reg}")));
        }
        if v == 0.0 {
            return Ok(Deconvolution {
                measure: self.clone(),
                residual: 0.0,
                clamped_mass: 0.0,
                reliable: true,
            });
        }
        let grid = self.grid();
        let dx = grid.step();
        let n = grid.n;
        let k = (8.0 * v.sqrt() / dx).ceil() as usize;
        let len = (n + 2 * k + 1).next_power_of_two() * 2;
        let mut planner = FftPlanner::<f64>::new();
        let fwd = planner.plan_fft_forward(len);
        let inv = planner.plan_fft_inverse(len);

        let mut signal: Vec<Complex<f64>> = (0..len)
            .map(|i| Complex::new(if i < n { self.density[i] } else { 0.0 }, 0.0))
            .collect();
        let norm = dx / (2.0 * std::f64::consts::PI * v).sqrt();
        let mut kernel: Vec<Complex<f64>> = (0..len)
            .map(|i| {
                let d = if i <= len / 2 { i as f64 } else { i as f64 - len as f64 };
                let z = d * dx;
                Complex::new(norm * (-(z * z) / (2.0 * v)).exp(), 0.0)
            })
            .collect();
        fwd.process(&mut signal);
        fwd.process(&mut kernel);
        for (s, kk) in signal.iter_mut().zip(&kernel) {
            let kr = kk.re;
            *s *= kr / (kr * kr + reg);
        }
        inv.process(&mut signal);
        let scale = 1.0 / len as f64;
        let raw: Vec<f64> = signal[..n].iter().map(|c| c.re * scale).collect();
        let negative: Vec<f64> = raw.iter().map(|x| (-x).max(0.0)).collect();
        let clamped_mass = trapezoid(&negative, dx);
        let measure = Self::from_density(grid, raw.iter().map(|x| x.max(0.0)).collect())?;
        let residual = measure.convolve_gaussian_onto(v, grid)?.sup_distance(self);
        Ok(Deconvolution {
            measure,
            residual,
            clamped_mass,
            reliable: residual <= DECONVOLUTION_RESIDUAL_LIMIT,
        })
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "x,density")?;
        for (x, d) in self.points().iter().zip(&self.density) {
            writeln!(w, "{x},{d}")?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: Measure1D = serde_json::from_str(s)?;
        let grid = UniformGrid::new(raw.lo, raw.hi, raw.n_grid)?;
        Self::from_density(grid, raw.density)
    }
}

#[derive(Clone, Debug)]
pub struct Deconvolution {
    pub measure: Measure1D,
    /// Sup-norm distance between `gamma_v * measure` and the input.
    pub residual: f64,
    /// Mass removed by clamping negative ringing to zero.
    pub clamped_mass: f64,
    pub reliable: bool,
}

/// Weighted point masses, kept sorted by location.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalMeasure {
    atoms: Vec<(f64, f64)>,
    mass: f64,
}

impl EmpiricalMeasure {
    pub fn from_atoms(mut atoms: Vec<(f64, f64)>) -> Result<Self> {
        if let Some(a) = atoms.iter().find(|(x, w)| !(x.is_finite() && *w > 0.0 && w.is_finite())) {
            return Err(invalid(format!("atoms need finite locations and positive weights, got {a:?}")));
        }
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mass = atoms.iter().map(|a| a.1).sum();
        Ok(Self { atoms, mass })
    }

    /// Unit-weight atoms at each value.
    pub fn from_values(values: &[f64]) -> Result<Self> {
        Self::from_atoms(values.iter().map(|&x| (x, 1.0)).collect())
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn normalize(&self) -> Result<Self> {
        if !(self.mass > 0.0) {
            return Err(Error::ZeroMass);
        }
        Self::from_atoms(self.atoms.iter().map(|&(x, w)| (x, w / self.mass)).collect())
    }

    /// Pushforward under `x -> t x`.
    pub fn rescale_pushforward(&self, t: f64) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(invalid(format!("rescaling factor must be positive, got {t}")));
        }
        Self::from_atoms(self.atoms.iter().map(|&(x, w)| (x * t, w)).collect())
    }

    /// Histogram with `bins` equal bins on `[lo, hi]`, as a density with nodes
    /// at bin centers and zero-valued end nodes half a bin outside the range.
    /// Mass outside the range is dropped.
    pub fn histogram(&self, lo: f64, hi: f64, bins: usize) -> Result<Measure1D> {
        let mut counts = vec![0.0; bins];
        let width = (hi - lo) / bins as f64;
        for &(x, w) in &self.atoms {
            if x >= lo && x < hi {
                let b = (((x - lo) / width) as usize).min(bins - 1);
                counts[b] += w;
            }
        }
        histogram_measure(lo, hi, &counts, self.mass)
    }
}

/// Density from bin weights; see [`EmpiricalMeasure::histogram`].
pub fn histogram_measure(lo: f64, hi: f64, counts: &[f64], total: f64) -> Result<Measure1D> {
    let bins = counts.len();
    if bins == 0 || !(hi > lo) {
        return Err(invalid("histogram needs at least one bin and lo < hi"));
    }
    let width = (hi - lo) / bins as f64;
    let grid = UniformGrid::new(lo - 0.5 * width, hi + 0.5 * width, bins + 2)?;
    let mut density = vec![0.0; bins + 2];
    for (b, c) in counts.iter().enumerate() {
        density[b + 1] = c / (total * width);
    }
    Measure1D::from_density(grid, density)
}

/// Objects with a (normalized) cumulative distribution function.
pub trait Cdf {
    fn mass(&self) -> f64;
    fn is_probability(&self) -> bool {
        (self.mass() - 1.0).abs() <= PROBABILITY_TOL
    }
}

impl Cdf for Measure1D {
    fn mass(&self) -> f64 {
        self.mass
    }
}

impl Cdf for EmpiricalMeasure {
    fn mass(&self) -> f64 {
        self.mass
    }
}

/// Kolmogorov-Smirnov distance between two grid measures, evaluated at every
/// node of both grids.
pub fn ks_distance(a: &Measure1D, b: &Measure1D) -> Result<f64> {
    a.require_probability()?;
    b.require_probability()?;
    let (ca, cb) = (a.cumulative(), b.cumulative());
    let mut sup: f64 = 0.0;
    for x in a.points().into_iter().chain(b.points()) {
        let fa = a.cdf_at(x, &ca) / a.mass;
        let fb = b.cdf_at(x, &cb) / b.mass;
        sup = sup.max((fa - fb).abs());
    }
    Ok(sup.min(1.0))
}

/// Kolmogorov-Smirnov distance between an empirical measure and a grid measure.
pub fn ks_distance_empirical(a: &EmpiricalMeasure, b: &Measure1D) -> Result<f64> {
    b.require_probability()?;
    let cb = b.cumulative();
    ks_empirical_fn(a, |x| b.cdf_at(x, &cb) / b.mass)
}

/// Kolmogorov-Smirnov distance between an empirical measure and any CDF.
pub fn ks_empirical_fn(a: &EmpiricalMeasure, cdf: impl Fn(f64) -> f64) -> Result<f64> {
    if !a.is_probability() {
        return Err(Error::Unnormalized(a.mass));
    }
    let mut below = 0.0;
    let mut sup: f64 = 0.0;
    let atoms = a.atoms();
    let mut i = 0;
    while i < atoms.len() {
        let x = atoms[i].0;
        let mut above = below;
        while i < atoms.len() && atoms[i].0 == x {
            above += atoms[i].1 / a.mass;
            i += 1;
        }
        let f = cdf(x);
        sup = sup.max((f - below).abs()).max((f - above).abs());
        below = above;
    }
    Ok(sup.min(1.0))
}

/// First Wasserstein distance `int |F_a - F_b|` between grid measures.
pub fn wasserstein1(a: &Measure1D, b: &Measure1D) -> Result<f64> {
    a.require_probability()?;
    b.require_probability()?;
    let (ca, cb) = (a.cumulative(), b.cumulative());
    let mut xs: Vec<f64> = a.points().into_iter().chain(b.points()).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let diff: Vec<f64> = xs
        .iter()
        .map(|&x| (a.cdf_at(x, &ca) / a.mass - b.cdf_at(x, &cb) / b.mass).abs())
        .collect();
    Ok(xs.windows(2).zip(diff.windows(2)).map(|(x, d)| 0.5 * (x[1] - x[0]) * (d[0] + d[1])).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::{centered_normal_cdf, normal_pdf};

    fn grid() -> UniformGrid {
        UniformGrid::symmetric(10.0, 2001).unwrap()
    }

    #[test]
    fn gaussian_semigroup() {
        let g = Measure1D::gaussian(grid(), 0.7).unwrap();
        let c = g.convolve_gaussian(0.9).unwrap();
        let err = c
            .points()
            .iter()
            .zip(c.density())
            .map(|(&x, d)| (d - normal_pdf(0.0, 1.6, x)).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-6, "sup error {err}");
        assert!((c.mass() - g.mass()).abs() < 1e-8);
        assert_eq!(g.convolve_gaussian(0.0).unwrap(), g);
    }

    #[test]
    fn pushforward_scales_variance() {
        let g = Measure1D::gaussian(grid(), 1.0).unwrap();
        let p = g.rescale_pushforward(2.0).unwrap();
        let err = p
            .points()
            .iter()
            .zip(p.density())
            .map(|(&x, d)| (d - normal_pdf(0.0, 4.0, x)).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-6);
        assert!((p.mass() - g.mass()).abs() < 1e-10);
        assert_eq!(g.rescale_pushforward(1.0).unwrap(), g);
        assert!(g.rescale_pushforward(0.0).is_err());
        assert!(g.rescale_pushforward(-1.0).is_err());
    }

    #[test]
    fn deconvolution_recovers_gaussian() {
        let g = Measure1D::gaussian(UniformGrid::symmetric(8.0, 1024).unwrap(), 1.0).unwrap();
        let d = g.deconvolve_gaussian(0.5, DEFAULT_DECONVOLUTION_REG).unwrap();
        let err = d
            .measure
            .points()
            .iter()
            .zip(d.measure.density())
            .map(|(&x, v)| (v - normal_pdf(0.0, 0.5, x)).abs())
            .fold(0.0, f64::max);
        assert!(err <= 1e-3, "sup error {err}");
        assert!(d.residual <= 1e-6, "residual {}", d.residual);
        assert!(d.reliable);
        let same = g.deconvolve_gaussian(0.0, 1e-8).unwrap();
        assert_eq!(same.measure, g);
    }

    #[test]
    fn ks_examples() {
        let g = Measure1D::gaussian(grid(), 1.0).unwrap().normalize().unwrap();
        assert_eq!(ks_distance(&g, &g).unwrap(), 0.0);
        let narrow = Measure1D::gaussian(grid(), 1e-4).unwrap().normalize().unwrap();
        let ks = ks_distance(&g, &narrow).unwrap();
        // Analytic oracle: sup_x |Phi(x) - Phi(x / 0.01)|.
        let oracle = (0..20001)
            .map(|i| -1.0 + i as f64 * 1e-4)
            .map(|x| (centered_normal_cdf(1.0, x) - centered_normal_cdf(1e-4, x)).abs())
            .fold(0.0, f64::max);
        assert!((ks - oracle).abs() < 2e-3, "{ks} vs {oracle}");
        assert!(ks > 0.45 && ks <= 1.0);
        assert_eq!(ks, ks_distance(&narrow, &g).unwrap());
        let heavy = Measure1D::gaussian(grid(), 1.0).unwrap().scaled(2.0).unwrap();
        assert!(matches!(ks_distance(&g, &heavy), Err(Error::Unnormalized(_))));
    }

    #[test]
    fn empirical_ks_and_histogram() {
        let e = EmpiricalMeasure::from_values(&[-1.0, 0.0, 0.0, 2.0]).unwrap().normalize().unwrap();
        assert!((e.mass() - 1.0).abs() < 1e-12);
        let ks = ks_empirical_fn(&e, |x| centered_normal_cdf(1.0, x)).unwrap();
        // At 0 the empirical CDF jumps from 0.25 to 0.75 while Phi(0) = 0.5.
        assert!((ks - 0.25).abs() < 1e-12);
        let h = e.histogram(-2.0, 2.5, 9).unwrap();
        assert!((h.mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn json_round_trip() {
        let g = Measure1D::gaussian(UniformGrid::symmetric(3.0, 7).unwrap(), 1.0).unwrap();
        let s = g.to_json().unwrap();
        assert!(s.starts_with("{\"lo\":-3.0,\"hi\":3.0,\"n_grid\":7,\"mass\":"));
        assert_eq!(Measure1D::from_json(&s).unwrap(), g);
        assert!(g.to_csv_string().starts_with("x,density\n-3,"));
    }

    #[test]
    fn wasserstein_of_shift() {
        let g = UniformGrid::symmetric(10.0, 4001).unwrap();
        let a = Measure1D::from_fn(g, |x| normal_pdf(0.0, 1.0, x)).unwrap().normalize().unwrap();
        let b = Measure1D::from_fn(g, |x| normal_pdf(0.5, 1.0, x)).unwrap().normalize().unwrap();
        assert!((wasserstein1(&a, &b).unwrap() - 0.5).abs() < 1e-4);
    }
}
