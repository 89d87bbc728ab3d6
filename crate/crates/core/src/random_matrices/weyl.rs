//! Exact one-point functions of `GOE_n^{1/2}` for `n <= 4` by nested
//! integration of the Weyl density.
//!
//! With weight `exp(-t^2/2)` the unnormalised marginal of one eigenvalue `s`
//! is `exp(-s^2/2) J_n(s)`, where `J_n` integrates
//! `prod |s - t_i| prod_{i<j} |t_i - t_j| exp(-sum t_i^2/2)` over `R^{n-1}`.
//! The innermost variable is integrated in closed form: the integrand is
//! `|P(t)| exp(-t^2/2)` for a monic polynomial `P` with known real roots, so
//! it reduces to truncated Gaussian moments.

use crate::quadrature::Quadrature;
use crate::special::std_normal_interval;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::sync::OnceLock;

/// Beyond this radius the Gaussian weight is below `1e-42`.
const CUTOFF: f64 = 14.0;

fn quad() -> Quadrature {
    Quadrature { abs_tol: 1e-15, rel_tol: 1e-12, max_intervals: 400 }
}

/// `int_a^b t^p exp(-t^2/2) dt` for `p = 0..=deg`; infinite ends allowed.
fn truncated_moments(a: f64, b: f64, deg: usize, out: &mut [f64; 5]) {
    let edge = |t: f64| if t.is_finite() { (-0.5 * t * t).exp() } else { 0.0 };
    let (ea, eb) = (edge(a), edge(b));
    out[0] = (2.0 * PI).sqrt() * std_normal_interval(a, b);
    if deg >= 1 {
        out[1] = ea - eb;
    }
    // int t^p w = [-t^{p-1} w]_a^b + (p-1) int t^{p-2} w
    let pow = |t: f64, k: i32| if t.is_finite() { t.powi(k) } else { 0.0 };
    for p in 2..=deg {
        out[p] = pow(a, p as i32 - 1) * ea - pow(b, p as i32 - 1) * eb + (p - 1) as f64 * out[p - 2];
    }
}

/// `int_R |prod_j (t - r_j)| exp(-t^2/2) dt` for up to four roots.
pub(crate) fn abs_poly_gauss(roots: &[f64]) -> f64 {
    let k = roots.len();
    assert!(k <= 4);
    let mut sorted = [0.0; 4];
    sorted[..k].copy_from_slice(roots);
    let sorted = &mut sorted[..k];
    sorted.sort_by(f64::total_cmp);
    // Coefficients of the monic polynomial, lowest degree first.
    let mut coef = [0.0; 5];
    coef[0] = 1.0;
    for (deg, &r) in sorted.iter().enumerate() {
        for p in (0..=deg + 1).rev() {
            let lower = if p > 0 { coef[p - 1] } else { 0.0 };
            coef[p] = lower - r * coef[p];
        }
    }
    let mut total = 0.0;
    let mut moments = [0.0; 5];
    for i in 0..=k {
        let a = if i == 0 { f64::NEG_INFINITY } else { sorted[i - 1] };
        let b = if i == k { f64::INFINITY } else { sorted[i] };
        if b <= a {
            continue;
        }
        truncated_moments(a, b, k, &mut moments);
        let piece: f64 = (0..=k).map(|p| coef[p] * moments[p]).sum();
        let sign = if (k - i) % 2 == 0 { 1.0 } else { -1.0 };
        total += sign * piece;
    }
    total
}

/// `J_n(s)` for `1 <= n <= 4`.
pub(crate) fn j_n(n: usize, s: f64) -> f64 {
    match n {
        1 => 1.0,
        2 => abs_poly_gauss(&[s]),
        3 => {
            let f = |t: f64| (s - t).abs() * (-0.5 * t * t).exp() * abs_poly_gauss(&[s, t]);
            integrate_with_kink(f, s, -CUTOFF, CUTOFF)
        }
        4 => {
            // Symmetric in (t1, t2): integrate over t2 < t1 and double.
            let outer = |t1: f64| {
                let inner = |t2: f64| {
                    (s - t2).abs() * (t1 - t2) * (-0.5 * t2 * t2).exp() * abs_poly_gauss(&[s, t1, t2])
                };
                let mid = integrate_with_kink(inner, s, -CUTOFF, t1);
                (s - t1).abs() * (-0.5 * t1 * t1).exp() * mid
            };
            2.0 * integrate_with_kink(outer, s, -CUTOFF, CUTOFF)
        }
        _ => panic!("exact one-point function only for n <= 4"),
    }
}

/// Segments of `[0, CUTOFF]` and nodes per segment for the cached `J_3`, `J_4`.
const SEGMENTS: [(f64, f64); 3] = [(0.0, 4.0), (4.0, 8.0), (8.0, CUTOFF)];
const CHEB_NODES: usize = 64;

static CHEB: [OnceLock<Vec<Vec<f64>>>; 2] = [OnceLock::new(), OnceLock::new()];

fn chebyshev_coefficients(n: usize, lo: f64, hi: f64) -> Vec<f64> {
    let nn = CHEB_NODES;
    let theta = |j: usize| PI * (j as f64 + 0.5) / nn as f64;
    let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
    let f: Vec<f64> = (0..nn).into_par_iter().map(|j| j_n(n, mid + half * theta(j).cos())).collect();
    (0..nn)
        .map(|k| {
            let c: f64 = (0..nn).map(|j| f[j] * (k as f64 * theta(j)).cos()).sum();
            if k == 0 { c / nn as f64 } else { 2.0 * c / nn as f64 }
        })
        .collect()
}

/// `J_n(s)` from piecewise Chebyshev interpolants of the even, entire `J_n`,
/// built once per process for `n = 3, 4`. Each segment spans a small range of
/// values, so the relative error stays near the quadrature accuracy.
pub(crate) fn j_n_cached(n: usize, s: f64) -> f64 {
    let s = s.abs();
    if n <= 2 || s > CUTOFF {
        return j_n(n, s);
    }
    let tables = CHEB[n - 3].get_or_init(|| {
        SEGMENTS.iter().map(|&(lo, hi)| chebyshev_coefficients(n, lo, hi)).collect()
    });
    let k = SEGMENTS.iter().position(|&(_, hi)| s <= hi).unwrap_or(SEGMENTS.len() - 1);
    let (lo, hi) = SEGMENTS[k];
    let c = &tables[k];
    let x = (2.0 * s - lo - hi) / (hi - lo);
    let (mut b1, mut b2) = (0.0, 0.0);
    for &ck in c.iter().skip(1).rev() {
        let b0 = 2.0 * x * b1 - b2 + ck;
        b2 = b1;
        b1 = b0;
    }
    x * b1 - b2 + c[0]
}

fn integrate_with_kink(f: impl FnMut(f64) -> f64, kink: f64, a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let pts: Vec<f64> = if kink > a && kink < b { vec![a, kink, b] } else { vec![a, b] };
    quad().integrate_pieces(f, &pts).value
}

/// `prod_{i<j} |l_i - l_j| exp(-sum l_i^2 / (4v))`, the unnormalised Weyl
/// density of eigenvalues of `GOE_n^v`.
pub fn weyl_integrand(lambda: &[f64], v: f64) -> f64 {
    let mut prod = 1.0;
    for i in 0..lambda.len() {
        for j in i + 1..lambda.len() {
            prod *= (lambda[i] - lambda[j]).abs();
        }
    }
    prod * (-lambda.iter().map(|x| x * x).sum::<f64>() / (4.0 * v)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn brute(roots: &[f64]) -> f64 {
        let f = |t: f64| roots.iter().map(|r| (t - r).abs()).product::<f64>() * (-0.5 * t * t).exp();
        let mut pts = roots.to_vec();
        pts.sort_by(f64::total_cmp);
        Quadrature::default().integrate_real_line(f, &pts).value
    }

    #[test]
    fn closed_form_matches_quadrature() {
        for roots in [vec![], vec![0.0], vec![0.7], vec![-1.2, 2.5], vec![0.1, 0.1], vec![-3.0, 0.4, 1.9], vec![5.0, 6.0, -0.2]] {
            assert_relative_eq!(abs_poly_gauss(&roots), brute(&roots), max_relative = 1e-11);
        }
        assert_relative_eq!(abs_poly_gauss(&[0.0]), 2.0, max_relative = 1e-15);
    }

    #[test]
    fn cached_matches_direct() {
        for n in [3, 4] {
            for s in [0.0, 0.37, 1.9, -2.4, 4.0, 4.1, 7.7, 9.3, 12.5, 13.99] {
                let (a, b) = (j_n_cached(n, s), j_n(n, s));
                assert_relative_eq!(a, b, max_relative = 1e-11);
            }
        }
    }
}
