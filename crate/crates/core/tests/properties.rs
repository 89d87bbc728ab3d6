//! Property tests for the invariants of each module.

use critval::gaussian::{condition, GaussianVector};
use critval::limit_law::case1_identity_check;
use critval::measure::{ks_distance, Measure1D, UniformGrid};
use critval::random_matrices::{semicircle_cdf, ExactRho, OnePointDensity};
use critval::spectral::r_lower_bound;
use critval::torus::{build_spectrum, sample_field};
use critval::{omega_params, spectral_constants};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use std::sync::Arc;

fn bump(grid: UniformGrid, centre: f64, width: f64) -> Measure1D {
    Measure1D::from_fn(grid, |x| (-(x - centre).powi(2) / (2.0 * width * width)).exp()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn constant_identities(m in 1i64..=200) {
        let c = spectral_constants(m).unwrap();
        prop_assert!(c.s_identity_residual() <= 1e-12);
        prop_assert!(c.d_identity_residual() <= 1e-12);
        prop_assert!(c.s > 0.0 || c.ln_s < -700.0);
    }

    #[test]
    fn omega_respects_constraint(m in 1i64..=40, l in 1.0f64..100.0, extra in 0.0f64..3.0) {
        let r = r_lower_bound(m as u32) + extra;
        let p = omega_params(m, l, r).unwrap();
        prop_assert!(p.omega_bar >= 0.0);
        let mf = m as f64;
        let expected = r * (mf + 4.0) / (mf + 2.0) * p.constants.s;
        prop_assert!((p.s_omega - expected).abs() <= 1e-12 * expected);
        if r_lower_bound(m as u32) > 1e-3 {
            prop_assert!(omega_params(m, l, r_lower_bound(m as u32) - 1e-3).is_err());
        }
    }

    #[test]
    fn conditioning_shrinks_variance(seed in 0u64..1000, dim in 2usize..6, shift in -2.0f64..2.0) {
        let mut state = seed;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        let a = DMatrix::from_fn(dim, dim, |_, _| next());
        let cov = &a * a.transpose() + DMatrix::identity(dim, dim) * 0.1;
        let joint = GaussianVector::new(DVector::zeros(dim), cov.clone()).unwrap();
        let c = condition(&joint, &[0], &[shift]).unwrap();
        for (j, &f) in c.free.iter().enumerate() {
            prop_assert!(c.gaussian.cov()[(j, j)] <= cov[(f, f)] + 1e-12);
            // Linear regression: the mean is the covariance ratio times the shift.
            let slope = cov[(f, 0)] / cov[(0, 0)];
            prop_assert!((c.gaussian.mean()[j] - slope * shift).abs() <= 1e-9 * (1.0 + shift.abs()));
        }
        let eig = c.gaussian.cov().clone().symmetric_eigenvalues();
        prop_assert!(eig.min() >= -1e-10 * eig.max().max(1.0));
    }

    #[test]
    fn convolution_keeps_mass_and_mean(centre in -2.0f64..2.0, width in 0.3f64..1.5, v in 0.05f64..2.0) {
        let grid = UniformGrid::symmetric(12.0, 801).unwrap();
        let m = bump(grid, centre, width).normalize().unwrap();
        let c = m.convolve_gaussian(v).unwrap();
        prop_assert!((c.mass() - 1.0).abs() <= 1e-6);
        prop_assert!((c.mean() - m.mean()).abs() <= 1e-6);
        prop_assert!((c.variance() - m.variance() - v).abs() <= 1e-4);
    }

    #[test]
    fn pushforward_scales_variance(width in 0.3f64..1.5, t in 0.2f64..3.0) {
        let grid = UniformGrid::symmetric(10.0, 1001).unwrap();
        let m = bump(grid, 0.0, width).normalize().unwrap();
        let p = m.rescale_pushforward(t).unwrap();
        prop_assert!((p.mass() - 1.0).abs() <= 1e-9);
        prop_assert!((p.variance() - t * t * m.variance()).abs() <= 1e-6 * t * t);
    }

    #[test]
    fn ks_is_a_metric_on_samples(a in -2.0f64..2.0, b in -2.0f64..2.0, w in 0.3f64..1.5) {
        let grid = UniformGrid::symmetric(10.0, 501).unwrap();
        let x = bump(grid, a, w).normalize().unwrap();
        let y = bump(grid, b, w).normalize().unwrap();
        let d = ks_distance(&x, &y).unwrap();
        prop_assert!((0.0..=1.0).contains(&d));
        prop_assert!((d - ks_distance(&y, &x).unwrap()).abs() <= 1e-15);
        prop_assert_eq!(ks_distance(&x, &x).unwrap(), 0.0);
    }

    #[test]
    fn exact_rho_even_and_rescales(n in 1usize..=3, v in 0.2f64..3.0, c in 0.3f64..3.0, x in -4.0f64..4.0) {
        let rho = ExactRho::new(n, v).unwrap();
        let a = rho.value(x);
        prop_assert!(a >= 0.0);
        prop_assert!((a - rho.value(-x)).abs() <= 1e-15 * a.max(1e-300));
        // rho_{n,v/c^2}(x) = c rho_{n,v}(c x)
        let scaled = ExactRho::new(n, v / (c * c)).unwrap().value(x);
        prop_assert!((scaled - c * rho.value(c * x)).abs() <= 1e-10 * scaled.max(1e-300));
    }

    #[test]
    fn semicircle_cdf_is_monotone(v in 0.1f64..4.0, x in -5.0f64..5.0, dx in 0.0f64..1.0) {
        let (a, b) = (semicircle_cdf(v, x), semicircle_cdf(v, x + dx));
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert!(b >= a - 1e-15);
    }

    #[test]
    fn case1_identity_holds(r in 1.0f64..8.0, l in -6.0f64..6.0, y in -6.0f64..6.0) {
        prop_assert!(case1_identity_check(r, l, y).unwrap() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn torus_fields_are_periodic(seed in 0u64..10_000, x in 0.0f64..1.0, y in 0.0f64..1.0, kx in -3i32..3, ky in -3i32..3) {
        let s = Arc::new(build_spectrum(2, 20.0).unwrap());
        let f = sample_field(&s, 1.5, seed).unwrap();
        let a = f.eval(&[x, y]);
        let b = f.eval(&[x + kx as f64, y + ky as f64]);
        let scale = a.value.abs().max(1.0);
        prop_assert!((a.value - b.value).abs() <= 1e-12 * scale * 10.0);
        let h = a.hessian();
        prop_assert_eq!(h[(0, 1)], h[(1, 0)]);
    }

    #[test]
    fn spectrum_modes_within_band(l in 1.0f64..60.0) {
        let s = build_spectrum(2, l).unwrap();
        prop_assert_eq!(s.dim(), 1 + 2 * s.frequencies.len());
        for k in &s.frequencies {
            let n2: i64 = k.iter().map(|c| c * c).sum();
            prop_assert!(4.0 * std::f64::consts::PI.powi(2) * n2 as f64 <= l * l);
            prop_assert!(n2 > 0);
        }
    }
}
