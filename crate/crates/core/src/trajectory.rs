//! Piecewise-polynomial signals on a uniform grid of segments.

use crate::error::{dim_err, Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::poly_basis::InterpolationBasis;

/// One segment `p(kτ + t) = value_at_0 φ_0(t) + coeffs Φ(t)`, `t ∈ [0, τ]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentPolynomial {
    pub value_at_0: Vector,
    pub coeffs: Matrix,
}

impl SegmentPolynomial {
    /// `[value_at_0 | coeffs]`, the node values of the segment.
    pub fn node_values(&self) -> Matrix {
        let d = self.value_at_0.len();
        let n = self.coeffs.ncols();
        let mut out = Matrix::zeros(d, n + 1);
        out.column_mut(0).copy_from(&self.value_at_0);
        out.columns_mut(1, n).copy_from(&self.coeffs);
        out
    }
}

#[derive(Debug, Clone)]
pub struct PiecewisePolynomial {
    basis: InterpolationBasis,
    segments: Vec<SegmentPolynomial>,
}

impl PiecewisePolynomial {
    pub fn new(basis: InterpolationBasis, segments: Vec<SegmentPolynomial>) -> Result<Self> {
        let Some(first) = segments.first() else {
            return Err(Error::InvalidContract("piecewise polynomial without segments".into()));
        };
        let d = first.value_at_0.len();
        for s in &segments {
            if s.value_at_0.len() != d || s.coeffs.nrows() != d {
                return Err(dim_err("segment dimension", d, s.coeffs.nrows()));
            }
            if s.coeffs.ncols() != basis.degree() {
                return Err(dim_err("segment degree", basis.degree(), s.coeffs.ncols()));
            }
        }
        Ok(Self { basis, segments })
    }

    pub fn basis(&self) -> &InterpolationBasis {
        &self.basis
    }

    pub fn segments(&self) -> &[SegmentPolynomial] {
        &self.segments
    }

    pub fn dim(&self) -> usize {
        self.segments[0].value_at_0.len()
    }

    pub fn tau(&self) -> f64 {
        self.basis.tau()
    }

    /// End of the last segment.
    pub fn horizon(&self) -> f64 {
        self.tau() * self.segments.len() as f64
    }

    /// Segment index and local time for a global time `t`. Breakpoints
    /// belong to the segment that starts there, except the final endpoint.
    pub fn locate(&self, t: f64) -> Result<(usize, f64)> {
        let tau = self.tau();
        let horizon = self.horizon();
        let slack = 1e-12 * horizon.max(1.0);
        if !(t >= -slack && t <= horizon + slack) {
            return Err(Error::OutOfDomain {
                name: "t",
                value: t,
                lower: 0.0,
                upper: horizon,
            });
        }
        let t = t.clamp(0.0, horizon);
        let mut k = (t / tau).floor() as usize;
        // Snap values like 2.9999999999999996 onto the breakpoint.
        if k + 1 < self.segments.len() && ((k + 1) as f64 * tau - t).abs() <= slack {
            k += 1;
        }
        let k = k.min(self.segments.len() - 1);
        let local = (t - k as f64 * tau).clamp(0.0, tau);
        Ok((k, local))
    }

    pub fn eval(&self, t: f64) -> Result<Vector> {
        let (k, s) = self.locate(t)?;
        self.eval_segment(k, s)
    }

    pub fn eval_segment(&self, k: usize, local_t: f64) -> Result<Vector> {
        let seg = &self.segments[k];
        self.basis.eval_segment_poly(&seg.value_at_0, &seg.coeffs, local_t)
    }

    pub fn derivative(&self, t: f64) -> Result<Vector> {
        let (k, s) = self.locate(t)?;
        self.derivative_segment(k, s)
    }

    pub fn derivative_segment(&self, k: usize, local_t: f64) -> Result<Vector> {
        let seg = &self.segments[k];
        self.basis.eval_segment_derivative(&seg.value_at_0, &seg.coeffs, local_t)
    }

    /// Coefficients of segment `k` in the monomials of `s = (t - kτ) / τ`:
    /// column `p` multiplies `s^p`.
    pub fn monomial_coefficients(&self, k: usize) -> Matrix {
        self.segments[k].node_values() * self.basis.monomial_coefficients()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly_basis::build_basis;
    use nalgebra::dvector;

    #[test]
    fn locate_and_eval() {
        let basis = build_basis(2, 0.5).unwrap();
        let nodes = basis.nodes().to_vec();
        // p(t) = t on each segment
        let seg = |k: f64| SegmentPolynomial {
            value_at_0: dvector![0.5 * k],
            coeffs: Matrix::from_row_slice(1, 2, &[0.5 * k + nodes[1], 0.5 * k + nodes[2]]),
        };
        let pp = PiecewisePolynomial::new(basis, vec![seg(0.0), seg(1.0), seg(2.0)]).unwrap();
        assert_eq!(pp.horizon(), 1.5);
        assert_eq!(pp.locate(0.5).unwrap(), (1, 0.0));
        assert_eq!(pp.locate(1.5).unwrap().0, 2);
        for t in [0.0, 0.1, 0.5, 0.77, 1.5] {
            assert!((pp.eval(t).unwrap()[0] - t).abs() < 1e-12);
            assert!((pp.derivative(t).unwrap()[0] - 1.0).abs() < 1e-10);
        }
        assert!(pp.eval(1.6).is_err());
        let mono = pp.monomial_coefficients(1);
        assert!((mono[(0, 0)] - 0.5).abs() < 1e-12);
        assert!((mono[(0, 1)] - 0.5).abs() < 1e-12);
        assert!(mono[(0, 2)].abs() < 1e-12);
    }
}
