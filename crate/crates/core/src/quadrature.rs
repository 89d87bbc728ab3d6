//! Globally adaptive Gauss-Kronrod (7/15) quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
    pub converged: bool,
}

#[derive(Clone, Copy, Debug)]
pub struct Quadrature {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self { abs_tol: 1e-14, rel_tol: 1e-12, max_intervals: 2000 }
    }
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Piece {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let sum = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * sum;
        if j % 2 == 1 {
            gauss += WG[j / 2] * sum;
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).abs();
    Piece { a, b, value, error }
}

impl Quadrature {
    pub fn with_tolerances(abs_tol: f64, rel_tol: f64) -> Self {
        Self { abs_tol, rel_tol, ..Self::default() }
    }

    /// Integrate over `[a, b]`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, f: F, a: f64, b: f64) -> QuadResult {
        self.integrate_pieces(f, &[a, b])
    }

    /// Integrate over `[points[0], points[last]]`, splitting at every interior
    /// point. Non-increasing and duplicate points are skipped.
    pub fn integrate_pieces<F: FnMut(f64) -> f64>(&self, mut f: F, points: &[f64]) -> QuadResult {
        let mut heap = BinaryHeap::new();
        let mut total = 0.0;
        let mut error = 0.0;
        for w in points.windows(2) {
            if w[1] > w[0] {
                let p = gk15(&mut f, w[0], w[1]);
                total += p.value;
                error += p.error;
                heap.push(p);
            }
        }
        loop {
            let target = self.abs_tol.max(self.rel_tol * total.abs());
            if error <= target {
                return QuadResult { value: total, error, intervals: heap.len(), converged: true };
            }
            if heap.len() >= self.max_intervals {
                return QuadResult { value: total, error, intervals: heap.len(), converged: false };
            }
            let Some(worst) = heap.pop() else {
                return QuadResult { value: 0.0, error: 0.0, intervals: 0, converged: true };
            };
            let mid = 0.5 * (worst.a + worst.b);
            if mid <= worst.a || mid >= worst.b {
                // Interval exhausted at machine resolution; keep it and stop refining.
                heap.push(worst);
                return QuadResult { value: total, error, intervals: heap.len(), converged: false };
            }
            let left = gk15(&mut f, worst.a, mid);
            let right = gk15(&mut f, mid, worst.b);
            total += left.value + right.value - worst.value;
            error += left.error + right.error - worst.error;
            heap.push(left);
            heap.push(right);
        }
    }

    /// Integrate over the whole real line with the substitution
    /// `x = t / (1 - t^2)`; `breaks` are mapped to the `t` axis.
    pub fn integrate_real_line<F: FnMut(f64) -> f64>(&self, mut f: F, breaks: &[f64]) -> QuadResult {
        let mut ts: Vec<f64> = breaks.iter().map(|&x| to_unit(x)).collect();
        ts.push(-1.0);
        ts.push(1.0);
        ts.sort_by(f64::total_cmp);
        ts.dedup();
        let g = |t: f64| {
            let d = 1.0 - t * t;
            if d <= 0.0 {
                return 0.0;
            }
            let x = t / d;
            let jac = (1.0 + t * t) / (d * d);
            let y = f(x) * jac;
            if y.is_finite() {
                y
            } else {
                0.0
            }
        };
        self.integrate_pieces(g, &ts)
    }
}

fn to_unit(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        (-1.0 + (1.0 + 4.0 * x * x).sqrt()) / (2.0 * x)
    }
}

/// Composite trapezoid rule on a uniform grid.
pub fn trapezoid(values: &[f64], dx: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => dx * (values.iter().sum::<f64>() - 0.5 * (values[0] + values[n - 1])),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_exactness() {
        let q = Quadrature::default();
        let r = q.integrate(|x| x.powi(20), -1.0, 1.0);
        assert_relative_eq!(r.value, 2.0 / 21.0, max_relative = 1e-13);
        assert!(r.converged);
    }

    #[test]
    fn kink_with_breakpoint() {
        let q = Quadrature::default();
        let r = q.integrate_pieces(|x: f64| (x - 0.3).abs(), &[-1.0, 0.3, 1.0]);
        assert_relative_eq!(r.value, 0.5 * 1.3 * 1.3 + 0.5 * 0.7 * 0.7, max_relative = 1e-14);
        assert_eq!(r.intervals, 2);
    }

    #[test]
    fn real_line_gaussian() {
        let q = Quadrature::default();
        let r = q.integrate_real_line(|x| (-x * x / 2.0).exp(), &[]);
        assert_relative_eq!(r.value, (2.0 * PI).sqrt(), max_relative = 1e-12);
        let r = q.integrate_real_line(|x| (x - 1.0).abs() * (-x * x / 2.0).exp(), &[1.0]);
        // E|Z - 1| * sqrt(2 pi)
        let phi = crate::special::std_normal_pdf(1.0);
        let cdf = crate::special::std_normal_cdf(1.0);
        let expect = (2.0 * phi + 1.0 * (2.0 * cdf - 1.0)) * (2.0 * PI).sqrt();
        assert_relative_eq!(r.value, expect, max_relative = 1e-11);
    }

    #[test]
    fn trapezoid_linear() {
        let v: Vec<f64> = (0..11).map(|i| i as f64 * 0.1).collect();
        assert_relative_eq!(trapezoid(&v, 0.1), 0.5, max_relative = 1e-14);
    }
}
