//! Natural cubic spline through equally spaced samples.

use alloc::vec;
use alloc::vec::Vec;

/// Natural cubic spline through `(i, y[i])` for `i = 0..n`.
///
/// Second derivatives vanish at both ends. Queries outside `[0, n-1]` are
/// clamped to the end points.
#[derive(Clone, Debug)]
pub struct NaturalSpline {
    y: Vec<f64>,
    /// Second derivative at each knot.
    m: Vec<f64>,
}

impl NaturalSpline {
    pub fn new(y: &[f64]) -> Self {
        let n = y.len();
        assert!(n >= 2, "a spline needs at least two knots");
        let mut m = vec![0.0; n];
        if n > 2 {
            // Tridiagonal system for interior knots, unit spacing:
            //   m[i-1] + 4 m[i] + m[i+1] = 6 (y[i-1] - 2 y[i] + y[i+1])
            // solved with the Thomas algorithm.
            let k = n - 2;
            let mut c = vec![0.0; k];
            let mut d = vec![0.0; k];
            for i in 0..k {
                let rhs = 6.0 * (y[i] - 2.0 * y[i + 1] + y[i + 2]);
                if i == 0 {
                    c[0] = 1.0 / 4.0;
                    d[0] = rhs / 4.0;
                } else {
                    let denom = 4.0 - c[i - 1];
                    c[i] = 1.0 / denom;
                    d[i] = (rhs - d[i - 1]) / denom;
                }
            }
            m[k] = d[k - 1];
            for i in (0..k - 1).rev() {
                m[i + 1] = d[i] - c[i] * m[i + 2];
            }
        }
        Self { y: y.to_vec(), m }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let last = (self.y.len() - 1) as f64;
        let x = x.clamp(0.0, last);
        let i = (libm::floor(x) as usize).min(self.y.len() - 2);
        let t = x - i as f64;
        let s = 1.0 - t;
        let (y0, y1) = (self.y[i], self.y[i + 1]);
        let (m0, m1) = (self.m[i], self.m[i + 1]);
        s * y0 + t * y1 + ((s * s * s - s) * m0 + (t * t * t - t) * m1) / 6.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolates_knots() {
        let y: Vec<f64> = (0..20).map(|i| libm::sin(i as f64 * 0.4) * 3.0).collect();
        let s = NaturalSpline::new(&y);
        for (i, &v) in y.iter().enumerate() {
            assert!((s.eval(i as f64) - v).abs() < 1e-12);
        }
    }

    #[test]
    fn reproduces_affine() {
        let y: Vec<f64> = (0..80).map(|i| 2.5 * i as f64 - 7.0).collect();
        let s = NaturalSpline::new(&y);
        for q in [0.0, 0.3, 10.7, 55.55, 78.9, 79.0] {
            assert!((s.eval(q) - (2.5 * q - 7.0)).abs() < 1e-9);
        }
    }

    #[test]
    fn second_derivative_continuity() {
        // Independent check: the spline's second derivative from either side
        // of each interior knot agrees, estimated by finite differences.
        let y: Vec<f64> = (0..12).map(|i| ((i * 7) % 5) as f64).collect();
        let s = NaturalSpline::new(&y);
        let h = 1e-4;
        for k in 1..11 {
            let x = k as f64;
            let left = (s.eval(x) - 2.0 * s.eval(x - h) + s.eval(x - 2.0 * h)) / (h * h);
            let right = (s.eval(x + 2.0 * h) - 2.0 * s.eval(x + h) + s.eval(x)) / (h * h);
            assert!((left - right).abs() < 1e-2, "knot {k}: {left} vs {right}");
        }
    }

    #[test]
    fn clamps_queries() {
        let s = NaturalSpline::new(&[1.0, 4.0, 2.0]);
        assert_eq!(s.eval(-3.0), 1.0);
        assert_eq!(s.eval(10.0), 2.0);
    }
}
