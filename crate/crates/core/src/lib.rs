//! Numerical laboratory for the critical-value statistics of random linear
//! combinations of Laplace eigenfunctions.
//!
//! The crate is organised bottom-up:
//!
//! * [`spectral`] evaluates the dimensional constants `s_m`, `d_m`, `h_m` and the
//!   variance parameterisation of the constant-mode shift.
//! * [`gaussian`] and [`measure`] hold finite-dimensional Gaussian vectors
//!   (sampling, regression-formula conditioning) and a small toolkit for finite
//!   measures on the real line.
//! * [`random_matrices`] implements the two-parameter Gaussian ensembles of real
//!   symmetric matrices, their one-point correlation functions and the
//!   expected absolute determinant identities.
//! * [`limit_law`] builds the universal limit measures of rescaled critical values.
//! * [`torus`] simulates random trigonometric fields on the flat torus, extracts
//!   their critical points and evaluates the Kac-Rice density exactly.
//! * [`cli`] wires everything into reproducible experiments.

pub mod cli;
pub mod error;
pub mod gaussian;
pub mod limit_law;
pub mod measure;
pub mod quadrature;
pub mod random_matrices;
pub mod report;
pub mod rng;
pub mod special;
pub mod spectral;
pub mod svg;
pub mod torus;

pub use error::{Error, Result};
pub use gaussian::{condition, gaussian_density, GaussianVector};
pub use measure::{EmpiricalMeasure, Measure1D, UniformGrid};
pub use random_matrices::{CorrelationFunction, MatrixEnsemble, OnePointDensity};
pub use spectral::{omega_params, spectral_constants, OmegaParams, SpectralConstants};

/// Value of a Monte Carlo (or otherwise uncertain) estimate.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Self { value, std_error: 0.0 }
    }

    /// Number of combined standard errors separating two estimates.
    pub fn z_score(&self, other: &Estimate) -> f64 {
        let se = self.std_error.hypot(other.std_error);
        let diff = (self.value - other.value).abs();
        if se == 0.0 {
            if diff == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            diff / se
        }
    }
}
