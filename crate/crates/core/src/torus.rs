//! Random trigonometric fields on the flat torus `T^m = R^m / Z^m`.
//!
//! The space spanned by Laplace eigenfunctions with eigenvalue at most `L^2`
//! has the orthonormal basis `1`, `sqrt(2) cos(2 pi k.x)`, `sqrt(2) sin(2 pi k.x)`
//! over lattice vectors `0 < 4 pi^2 |k|^2 <= L^2`, one `k` per `+-k` pair. A
//! random field has i.i.d. standard normal coefficients plus an independent
//! `N(0, omega)` constant shift.

use crate::error::{invalid, Error, Result};
use crate::gaussian::{condition, GaussianVector};
use crate::limit_law::{default_grid, sigma_mr};
use crate::measure::{ks_distance, ks_distance_empirical, EmpiricalMeasure, Measure1D, UniformGrid};
use crate::random_matrices::ExactRho;
use crate::rng::{derive_seed, par_batches, stream, Moments, StreamRng};
use crate::spectral::{omega_params, spectral_constants, OmegaParams};
use crate::Estimate;
use nalgebra::{DMatrix, DVector};
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

pub const DIMENSION_CAP: usize = 5000;
const TAU: f64 = 2.0 * PI;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusSpectrum {
    pub m: usize,
    #[serde(rename = "L")]
    pub l: f64,
    /// One representative per `+-k` pair, sorted by `|k|` then lexicographically.
    pub frequencies: Vec<Vec<i64>>,
}

impl TorusSpectrum {
    /// `1 + 2 * #pairs`.
    pub fn dim(&self) -> usize {
        1 + 2 * self.frequencies.len()
    }

    /// Largest `|k_i|` over all frequencies and axes.
    pub fn max_component(&self) -> i64 {
        self.frequencies.iter().flat_map(|k| k.iter().map(|c| c.abs())).max().unwrap_or(0)
    }

    /// Largest `|k|`.
    pub fn max_norm(&self) -> f64 {
        self.frequencies
            .iter()
            .map(|k| (k.iter().map(|c| c * c).sum::<i64>() as f64).sqrt())
            .fold(0.0, f64::max)
    }

    /// `sum_{pairs} k^gamma` for a multi-index `gamma`, in exact integer arithmetic.
    pub fn moment_sum(&self, gamma: &[u32]) -> i128 {
        self.frequencies
            .iter()
            .map(|k| k.iter().zip(gamma).map(|(&c, &g)| (c as i128).pow(g)).product::<i128>())
            .sum()
    }

    /// Seeds per axis used by default for critical-point search.
    pub fn default_grid_n(&self) -> usize {
        (10 * self.max_component() as usize).max(16)
    }
}

fn is_canonical(k: &[i64]) -> bool {
    match k.iter().find(|&&c| c != 0) {
        Some(&c) => c > 0,
        None => false,
    }
}

pub fn build_spectrum(m: usize, l: f64) -> Result<TorusSpectrum> {
    if !(m == 2 || m == 3) {
        return Err(invalid(format!("torus simulation needs dimension m > 1 and supports m in {{2, 3}}, got m = {m}")));
    }
    if !(l > 0.0 && l.is_finite()) {
        return Err(invalid(format!("L must be positive, got {l}")));
    }
    let radius2 = (l / TAU).powi(2);
    let kmax = radius2.sqrt().floor() as i64;
    // Refuse before enumerating when the ball volume already far exceeds the cap.
    let unit_ball = if m == 2 { PI } else { 4.0 * PI / 3.0 };
    let predicted = 1.0 + 2.0 * unit_ball * radius2.sqrt().powi(m as i32) / 2.0;
    if predicted > 2.0 * DIMENSION_CAP as f64 {
        return Err(Error::DimensionCap { dim: predicted as usize, cap: DIMENSION_CAP });
    }
    let mut freqs = Vec::new();
    let mut k = vec![-kmax; m];
    loop {
        let n2: i64 = k.iter().map(|c| c * c).sum();
        if is_canonical(&k) && (n2 as f64) * TAU * TAU <= l * l {
            freqs.push(k.clone());
        }
        // Odometer increment.
        let mut axis = 0;
        loop {
            if axis == m {
                let mut freqs = freqs;
                freqs.sort_by(|a: &Vec<i64>, b: &Vec<i64>| {
                    let na: i64 = a.iter().map(|c| c * c).sum();
                    let nb: i64 = b.iter().map(|c| c * c).sum();
                    na.cmp(&nb).then_with(|| a.cmp(b))
                });
                let dim = 1 + 2 * freqs.len();
                if dim > DIMENSION_CAP {
                    return Err(Error::DimensionCap { dim, cap: DIMENSION_CAP });
                }
                return Ok(TorusSpectrum { m, l, frequencies: freqs });
            }
            k[axis] += 1;
            if k[axis] > kmax {
                k[axis] = -kmax;
                axis += 1;
            } else {
                break;
            }
        }
    }
}

/// Value, gradient and Hessian of a field at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    pub m: usize,
    pub value: f64,
    pub grad: [f64; 3],
    pub hess: [[f64; 3]; 3],
}

impl Jet {
    pub fn gradient(&self) -> DVector<f64> {
        DVector::from_fn(self.m, |i, _| self.grad[i])
    }

    pub fn hessian(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.m, self.m, |i, j| self.hess[i][j])
    }

    pub fn grad_norm(&self) -> f64 {
        self.grad[..self.m].iter().map(|g| g * g).sum::<f64>().sqrt()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TorusField {
    pub spectrum: Arc<TorusSpectrum>,
    /// Coefficient of the constant eigenfunction.
    pub constant: f64,
    pub cos_coeffs: Vec<f64>,
    pub sin_coeffs: Vec<f64>,
    /// The `N(0, omega)` shift.
    pub shift: f64,
}

pub fn sample_field(spectrum: &Arc<TorusSpectrum>, omega: f64, seed: u64) -> Result<TorusField> {
    if !(omega >= 0.0 && omega.is_finite()) {
        return Err(invalid(format!("omega must be nonnegative, got {omega}")));
    }
    let mut rng = stream(seed, 0);
    Ok(draw_field(spectrum, omega, &mut rng))
}

fn draw_field(spectrum: &Arc<TorusSpectrum>, omega: f64, rng: &mut StreamRng) -> TorusField {
    let mut normal = || -> f64 { StandardNormal.sample(rng) };
    let constant = normal();
    let p = spectrum.frequencies.len();
    let mut cos_coeffs = Vec::with_capacity(p);
    let mut sin_coeffs = Vec::with_capacity(p);
    for _ in 0..p {
        cos_coeffs.push(normal());
        sin_coeffs.push(normal());
    }
    let z = normal();
    let shift = if omega > 0.0 { omega.sqrt() * z } else { 0.0 };
    TorusField { spectrum: Arc::clone(spectrum), constant, cos_coeffs, sin_coeffs, shift }
}

impl TorusField {
    pub fn from_coefficients(
        spectrum: Arc<TorusSpectrum>,
        constant: f64,
        cos_coeffs: Vec<f64>,
        sin_coeffs: Vec<f64>,
        shift: f64,
    ) -> Result<Self> {
        let p = spectrum.frequencies.len();
        if cos_coeffs.len() != p || sin_coeffs.len() != p {
            return Err(invalid("coefficient vectors must match the number of frequency pairs"));
        }
        Ok(Self { spectrum, constant, cos_coeffs, sin_coeffs, shift })
    }

    pub fn m(&self) -> usize {
        self.spectrum.m
    }

    /// Exact value, gradient and Hessian at `p` (reduced mod 1 first).
    pub fn eval(&self, p: &[f64]) -> Jet {
        let m = self.m();
        let mut x = [0.0; 3];
        for i in 0..m {
            x[i] = p[i] - p[i].floor();
        }
        let mut jet = Jet { m, value: self.constant + self.shift, grad: [0.0; 3], hess: [[0.0; 3]; 3] };
        let s2 = std::f64::consts::SQRT_2;
        for (idx, k) in self.spectrum.frequencies.iter().enumerate() {
            let mut phase = 0.0;
            for i in 0..m {
                phase += k[i] as f64 * x[i];
            }
            let phase = phase - phase.floor();
            let (sn, cs) = (TAU * phase).sin_cos();
            let (a, b) = (self.cos_coeffs[idx], self.sin_coeffs[idx]);
            let even = s2 * (a * cs + b * sn);
            let odd = s2 * (b * cs - a * sn);
            jet.value += even;
            for i in 0..m {
                let ki = TAU * k[i] as f64;
                jet.grad[i] += ki * odd;
                for j in i..m {
                    jet.hess[i][j] -= ki * TAU * k[j] as f64 * even;
                }
            }
        }
        for i in 0..m {
            for j in 0..i {
                jet.hess[i][j] = jet.hess[j][i];
            }
        }
        jet
    }

    /// RMS sizes of the gradient and Hessian entries, used as tolerance scales.
    pub fn derivative_scales(&self) -> (f64, f64) {
        let mut g = 0.0;
        let mut h = 0.0;
        for (idx, k) in self.spectrum.frequencies.iter().enumerate() {
            let k2: f64 = k.iter().map(|c| (*c as f64).powi(2)).sum::<f64>() * TAU * TAU;
            let c = self.cos_coeffs[idx].powi(2) + self.sin_coeffs[idx].powi(2);
            g += k2 * c;
            h += k2 * k2 * c;
        }
        (g.sqrt().max(1e-300), h.sqrt().max(1e-300))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalPointRecord {
    pub location: Vec<f64>,
    pub value: f64,
    pub morse_index: usize,
    pub hessian_det: f64,
    pub grad_norm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalPointSearch {
    pub points: Vec<CriticalPointRecord>,
    /// Some critical point has `|det Hess| < 1e-8 * scale`.
    pub non_morse: bool,
    pub seeds: usize,
    pub dropped_seeds: usize,
}

impl CriticalPointSearch {
    pub fn euler_characteristic(&self) -> i64 {
        self.points.iter().map(|p| if p.morse_index % 2 == 0 { 1 } else { -1 }).sum()
    }
}

fn periodic_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = (x - y).abs() % 1.0;
            d.min(1.0 - d)
        })
        .fold(0.0, f64::max)
}

/// Newton's method on the gradient from the centre of every cell of a
/// `grid_n^m` grid; converged points are merged within `1e-6` in the
/// periodic metric.
pub fn find_critical_points(field: &TorusField, grid_n: usize) -> Result<CriticalPointSearch> {
    let m = field.m();
    let need = 4 * field.spectrum.max_component() as usize;
    if grid_n < need.max(1) {
        return Err(invalid(format!("grid_n = {grid_n} is below 4 x max frequency = {need}")));
    }
    let (gscale, hscale) = field.derivative_scales();
    let grad_tol = 1e-10 * (gscale * 1e-3).max(1.0);
    let cell = 1.0 / grid_n as f64;
    let seeds = grid_n.pow(m as u32);
    let mut found: Vec<CriticalPointRecord> = Vec::new();
    let mut dropped = 0;
    let mut non_morse = false;
    for s in 0..seeds {
        let mut x = [0.0; 3];
        let mut rem = s;
        for xi in x.iter_mut().take(m) {
            *xi = ((rem % grid_n) as f64 + 0.5) * cell;
            rem /= grid_n;
        }
        let Some((loc, jet)) = newton(field, x, cell, grad_tol) else {
            dropped += 1;
            continue;
        };
        if found.iter().any(|p| periodic_distance(&p.location, &loc[..m]) < 1e-6) {
            continue;
        }
        let hess = jet.hessian();
        let eig = hess.clone().symmetric_eigenvalues();
        let det: f64 = eig.iter().product();
        if det.abs() < 1e-8 * hscale.powi(m as i32) {
            non_morse = true;
        }
        found.push(CriticalPointRecord {
            location: loc[..m].to_vec(),
            value: jet.value,
            morse_index: eig.iter().filter(|&&l| l < 0.0).count(),
            hessian_det: det,
            grad_norm: jet.grad_norm(),
        });
    }
    found.sort_by(|a, b| {
        a.location
            .iter()
            .zip(&b.location)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(CriticalPointSearch { points: found, non_morse, seeds, dropped_seeds: dropped })
}

fn newton(field: &TorusField, mut x: [f64; 3], cell: f64, tol: f64) -> Option<([f64; 3], Jet)> {
    let m = field.m();
    for _ in 0..60 {
        let jet = field.eval(&x[..m]);
        if jet.grad_norm() <= tol {
            for xi in x.iter_mut().take(m) {
                *xi -= xi.floor();
            }
            return Some((x, jet));
        }
        let h = jet.hessian();
        let g = jet.gradient();
        let svd = h.svd(true, true);
        let smax = svd.singular_values.max();
        let step = svd.solve(&g, 1e-12 * smax.max(1e-300)).ok()?;
        let norm = step.amax();
        let scale = if norm > cell { cell / norm } else { 1.0 };
        for i in 0..m {
            x[i] -= scale * step[i];
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldCriticalPoints {
    pub field_id: usize,
    pub points: Vec<CriticalPointRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalComplexity {
    /// Unit atoms at every critical value of every accepted field.
    pub values: EmpiricalMeasure,
    pub mean_count: f64,
    pub std_error: f64,
    pub fields_used: usize,
    pub non_morse_fields: usize,
    /// Fields whose alternating Morse count stayed nonzero after a refined search.
    pub incomplete_fields: usize,
    pub rejection_rate: f64,
    pub fields: Vec<FieldCriticalPoints>,
}

/// Critical values pooled over `n_fields` random fields. Field `i` is drawn
/// from the seed `derive_seed(seed, i)`.
pub fn empirical_complexity(
    spectrum: &Arc<TorusSpectrum>,
    omega: f64,
    n_fields: usize,
    seed: u64,
    grid_n: Option<usize>,
) -> Result<EmpiricalComplexity> {
    if n_fields == 0 {
        return Err(invalid("need at least one field"));
    }
    let grid_n = grid_n.unwrap_or_else(|| spectrum.default_grid_n());
    enum Outcome {
        Accepted(Vec<CriticalPointRecord>),
        NonMorse,
        Incomplete,
    }
    let outcomes: Result<Vec<Outcome>> = (0..n_fields)
        .into_par_iter()
        .map(|i| {
            let field = sample_field(spectrum, omega, derive_seed(seed, i as u64))?;
            let mut search = find_critical_points(&field, grid_n)?;
            if search.euler_characteristic() != 0 && !search.non_morse {
                search = find_critical_points(&field, 2 * grid_n)?;
            }
            Ok(if search.non_morse {
                Outcome::NonMorse
            } else if search.euler_characteristic() != 0 {
                Outcome::Incomplete
            } else {
                Outcome::Accepted(search.points)
            })
        })
        .collect();
    let mut fields = Vec::new();
    let mut counts = Moments::default();
    let (mut non_morse, mut incomplete) = (0, 0);
    let mut atoms = Vec::new();
    for (i, o) in outcomes?.into_iter().enumerate() {
        match o {
            Outcome::Accepted(points) => {
                counts.push(points.len() as f64);
                atoms.extend(points.iter().map(|p| (p.value, 1.0)));
                fields.push(FieldCriticalPoints { field_id: i, points });
            }
            Outcome::NonMorse => non_morse += 1,
            Outcome::Incomplete => incomplete += 1,
        }
    }
    if non_morse + incomplete > 0 {
        log::warn!("{non_morse} non-Morse and {incomplete} incomplete fields out of {n_fields} rejected");
    }
    Ok(EmpiricalComplexity {
        values: EmpiricalMeasure::from_atoms(atoms)?,
        mean_count: counts.mean(),
        std_error: counts.std_error(),
        fields_used: fields.len(),
        non_morse_fields: non_morse,
        incomplete_fields: incomplete,
        rejection_rate: (non_morse + incomplete) as f64 / n_fields as f64,
        fields,
    })
}

/// Exact covariance `E[d^alpha u d^beta u]` of the field without shift.
pub fn derivative_covariance(spectrum: &TorusSpectrum, alpha: &[u32], beta: &[u32]) -> f64 {
    let a: u32 = alpha.iter().sum();
    let b: u32 = beta.iter().sum();
    let total = a + b;
    if total % 2 == 1 {
        return 0.0;
    }
    // Each pair contributes 2 (2 pi)^{|a|+|b|} k^{a+b} (-1)^{|b|} Re(i^{|a|+|b|}).
    let sign = if (b + total / 2) % 2 == 0 { 1.0 } else { -1.0 };
    let gamma: Vec<u32> = alpha.iter().zip(beta).map(|(x, y)| x + y).collect();
    let sum = spectrum.moment_sum(&gamma);
    let base = if total == 0 { 1.0 } else { 0.0 };
    base + sign * 2.0 * TAU.powi(total as i32) * sum as f64
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CovarianceEntry {
    pub name: String,
    pub exact: f64,
    pub leading: f64,
    /// `exact / leading`, absent for entries that must vanish.
    pub ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CovarianceReport {
    pub m: usize,
    #[serde(rename = "L")]
    pub l: f64,
    pub dim: usize,
    pub entries: Vec<CovarianceEntry>,
}

impl CovarianceReport {
    pub fn entry(&self, name: &str) -> Option<&CovarianceEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    /// Entries whose leading term vanishes must be exactly zero.
    pub fn zeros_exact(&self) -> bool {
        self.entries.iter().filter(|e| e.ratio.is_none()).all(|e| e.exact == 0.0)
    }
}

fn unit(m: usize, idx: &[usize]) -> Vec<u32> {
    let mut v = vec![0u32; m];
    for &i in idx {
        v[i] += 1;
    }
    v
}

/// Exact covariances at the (arbitrary) reference point against their leading
/// terms `s L^m`, `d L^{m+2}`, `h L^{m+4}` and `-d L^{m+2}`.
pub fn covariance_report(spectrum: &TorusSpectrum) -> Result<CovarianceReport> {
    let m = spectrum.m;
    let c = spectral_constants(m as i64)?;
    let lm = spectrum.l.powi(m as i32);
    let l2 = spectrum.l * spectrum.l;
    let (s, d, h) = (c.s * lm, c.d * lm * l2, c.h * lm * l2 * l2);
    let cov = |a: &[usize], b: &[usize]| derivative_covariance(spectrum, &unit(m, a), &unit(m, b));
    let mut entries = Vec::new();
    let mut push = |name: &str, exact: f64, leading: f64| {
        let ratio = if leading == 0.0 { None } else { Some(exact / leading) };
        entries.push(CovarianceEntry { name: name.to_string(), exact, leading, ratio });
    };
    push("u,u", cov(&[], &[]), s);
    push("u_1,u_1", cov(&[0], &[0]), d);
    push("u_1,u_2", cov(&[0], &[1]), 0.0);
    push("u_11,u_11", cov(&[0, 0], &[0, 0]), 3.0 * h);
    push("u_11,u_22", cov(&[0, 0], &[1, 1]), h);
    push("u_12,u_12", cov(&[0, 1], &[0, 1]), h);
    push("u_11,u_12", cov(&[0, 0], &[0, 1]), 0.0);
    push("u,u_11", cov(&[], &[0, 0]), -d);
    push("u,u_12", cov(&[], &[0, 1]), 0.0);
    push("u,u_1", cov(&[], &[0]), 0.0);
    push("u_1,u_11", cov(&[0], &[0, 0]), 0.0);
    push("u_1,u_22", cov(&[0], &[1, 1]), 0.0);
    Ok(CovarianceReport { m, l: spectrum.l, dim: spectrum.dim(), entries })
}

/// Multi-indices of the jet coordinates `(u, du, Hess u)` with the Hessian in
/// upper-triangular order.
fn jet_coordinates(m: usize) -> Vec<Vec<u32>> {
    let mut out = vec![vec![0u32; m]];
    for i in 0..m {
        out.push(unit(m, &[i]));
    }
    for i in 0..m {
        for j in i..m {
            out.push(unit(m, &[i, j]));
        }
    }
    out
}

/// Joint Gaussian law of `(u_omega(p), du(p), Hess u(p))`.
pub fn jet_gaussian(spectrum: &TorusSpectrum, omega: f64) -> Result<GaussianVector> {
    let coords = jet_coordinates(spectrum.m);
    let n = coords.len();
    let mut cov = DMatrix::from_fn(n, n, |p, q| derivative_covariance(spectrum, &coords[p], &coords[q]));
    cov[(0, 0)] += omega;
    GaussianVector::centered(cov)
}

/// Law of `(u, Hess u)` given `du = 0` and the Kac-Rice prefactor
/// `det(2 pi S(du))^{-1/2}`.
struct KacRiceSetup {
    m: usize,
    /// Conditional law of (u, Hess u).
    cond: GaussianVector,
    prefactor: f64,
}

fn kac_rice_setup(spectrum: &TorusSpectrum, omega: f64) -> Result<KacRiceSetup> {
    if !(omega >= 0.0) {
        return Err(invalid(format!("omega must be nonnegative, got {omega}")));
    }
    if spectrum.frequencies.is_empty() {
        return Err(invalid("spectrum has no nonconstant modes"));
    }
    let m = spectrum.m;
    let joint = jet_gaussian(spectrum, omega)?;
    let observed: Vec<usize> = (1..=m).collect();
    let c = condition(&joint, &observed, &vec![0.0; m])?;
    let s_du = DMatrix::from_fn(m, m, |i, j| joint.cov()[(1 + i, 1 + j)]);
    let det = (s_du * TAU).determinant();
    Ok(KacRiceSetup { m, cond: c.gaussian, prefactor: 1.0 / det.sqrt() })
}

fn hessian_det(m: usize, h: &[f64]) -> f64 {
    // h holds the upper triangle in row-major order.
    match m {
        2 => h[0] * h[2] - h[1] * h[1],
        3 => {
            let (a, b, c, d, e, f) = (h[0], h[1], h[2], h[3], h[4], h[5]);
            a * (d * f - e * e) - b * (b * f - e * c) + c * (b * e - d * c)
        }
        _ => unreachable!("torus dimension is 2 or 3"),
    }
}

/// Kac-Rice density of critical values on `value_grid`. The field is
/// stationary, so the density at one point times the unit volume is exact.
/// Conditional expectations use common random numbers across the grid and
/// antithetic pairs, which makes the estimate exactly even.
pub fn kac_rice_density(
    spectrum: &TorusSpectrum,
    omega: f64,
    value_grid: UniformGrid,
    n_cond_samples: usize,
    seed: u64,
) -> Result<(Measure1D, Vec<f64>)> {
    let setup = kac_rice_setup(spectrum, omega)?;
    let m = setup.m;
    // Condition further on u = t: H | (u = t, du = 0) = t beta + C^{1/2} z.
    let cond_u = condition(&setup.cond, &[0], &[1.0])?;
    let beta: Vec<f64> = cond_u.gaussian.mean().iter().copied().collect();
    let var_u = setup.cond.cov()[(0, 0)];
    let sampler = GaussianVector::centered(cond_u.gaussian.cov().clone())?.sampler();
    let pts = value_grid.points();
    let g = pts.len();
    let pairs = n_cond_samples.div_ceil(2).max(2);
    let parts = par_batches(pairs, 1024, seed, |rng, range| {
        let mut sum = vec![0.0; g];
        let mut sum_sq = vec![0.0; g];
        let mut h = vec![0.0; beta.len()];
        for _ in range {
            let z = sampler.draw(rng);
            for (i, &t) in pts.iter().enumerate() {
                let mut pair = 0.0;
                for sign in [1.0, -1.0] {
                    for (k, hk) in h.iter_mut().enumerate() {
                        *hk = t * beta[k] + sign * z[k];
                    }
                    pair += 0.5 * hessian_det(m, &h).abs();
                }
                sum[i] += pair;
                sum_sq[i] += pair * pair;
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
    let np = pairs as f64;
    let mut density = Vec::with_capacity(g);
    let mut se = Vec::with_capacity(g);
    for (i, &t) in pts.iter().enumerate() {
        let mean = sum[i] / np;
        let var = ((sum_sq[i] - np * mean * mean) / (np - 1.0)).max(0.0);
        let w = setup.prefactor * crate::special::normal_pdf(0.0, var_u, t);
        density.push(w * mean);
        se.push(w * (var / np).sqrt());
    }
    Ok((Measure1D::from_density(value_grid, density)?, se))
}

/// Expected number of critical points, `det(2 pi S(du))^{-1/2} E(|det H| | du = 0)`.
pub fn kac_rice_total(spectrum: &TorusSpectrum, omega: f64, n_cond_samples: usize, seed: u64) -> Result<Estimate> {
    let setup = kac_rice_setup(spectrum, omega)?;
    let m = setup.m;
    let sampler = setup.cond.sampler();
    let parts = par_batches(n_cond_samples.max(2), 4096, seed, |rng, range| {
        let mut acc = Moments::default();
        for _ in range {
            let x = sampler.draw(rng);
            acc.push(hessian_det(m, &x.as_slice()[1..]).abs());
        }
        acc
    });
    let mut total = Moments::default();
    parts.iter().for_each(|p| total.merge(p));
    Ok(Estimate { value: setup.prefactor * total.mean(), std_error: setup.prefactor * total.std_error() })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniversalityReport {
    pub m: usize,
    #[serde(rename = "L")]
    pub l: f64,
    pub r: f64,
    pub omega: OmegaParams,
    pub dim: usize,
    pub n_fields: usize,
    pub fields_used: usize,
    pub rejection_rate: f64,
    pub critical_values: usize,
    pub mean_count: f64,
    pub count_std_error: f64,
    /// KS between rescaled critical values and `sigma_{m,r}`.
    pub ks: f64,
    /// KS of the unrescaled values against the same limit.
    pub ks_unrescaled: f64,
    /// Nominal 95% KS fluctuation `1.36 / sqrt(#values)` for independent values.
    pub ks_noise_floor: f64,
    pub value_scale: f64,
}

/// Rescaled empirical critical values against `sigma_{m,r}`.
pub fn universality_check(
    m: usize,
    l: f64,
    r: f64,
    n_fields: usize,
    seed: u64,
    grid_n: Option<usize>,
) -> Result<(UniversalityReport, EmpiricalComplexity, Measure1D)> {
    if m != 2 {
        return Err(invalid(format!("universality check runs at m = 2, got m = {m}")));
    }
    if !(r >= 1.0) {
        return Err(Error::RequiresRAtLeastOne(r));
    }
    let params = omega_params(m as i64, l, r)?;
    let spectrum = Arc::new(build_spectrum(m, l)?);
    let emp = empirical_complexity(&spectrum, params.omega, n_fields, seed, grid_n)?;
    let rho = ExactRho::new(m + 1, 1.0)?;
    let sigma = sigma_mr(m, r, default_grid(), &rho)?;
    let scale = params.value_scale();
    let values = emp.values.normalize()?;
    let rescaled = values.rescale_pushforward(1.0 / scale)?;
    let ks = ks_distance_empirical(&rescaled, &sigma)?;
    let ks_unrescaled = ks_distance_empirical(&values, &sigma)?;
    let report = UniversalityReport {
        m,
        l,
        r,
        omega: params,
        dim: spectrum.dim(),
        n_fields,
        fields_used: emp.fields_used,
        rejection_rate: emp.rejection_rate,
        critical_values: emp.values.len(),
        mean_count: emp.mean_count,
        count_std_error: emp.std_error,
        ks,
        ks_unrescaled,
        ks_noise_floor: 1.36 / (emp.values.len().max(1) as f64).sqrt(),
        value_scale: scale,
    };
    Ok((report, emp, sigma))
}

/// KS between the empirical critical values and the finite-`L` Kac-Rice density.
pub fn kac_rice_ks(emp: &EmpiricalComplexity, density: &Measure1D) -> Result<f64> {
    let d = density.normalize()?;
    ks_distance_empirical(&emp.values.normalize()?, &d)
}

/// KS between two grid measures, re-exported for report assembly.
pub fn measure_ks(a: &Measure1D, b: &Measure1D) -> Result<f64> {
    ks_distance(a, b)
}
