//! Bernstein basis and the conversion from node values to Bernstein
//! control points.
//!
//! A segment polynomial `p(t) = v0 phi_0(t) + C Phi(t)` equals
//! `V B(t / tau)` with `V = [v0 | C] M^{-1}`, where column `i` of `M` is
//! `B(t_i / tau)`. Bernstein polynomials are nonnegative on `[0, 1]` and sum
//! to one, so every value of `p` is a convex combination of the columns of
//! `V`.

use crate::error::{dim_err, Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::poly_basis::InterpolationBasis;

const MAX_CONDITION: f64 = 1e12;

/// `(b_{0,N}(s), ..., b_{N,N}(s))`, evaluated by repeated convex blending so
/// that every entry stays nonnegative.
pub fn bernstein_vector(degree: usize, s: f64) -> Result<Vector> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::OutOfDomain {
            name: "s",
            value: s,
            lower: 0.0,
            upper: 1.0,
        });
    }
    Ok(bernstein_unchecked(degree, s))
}

pub(crate) fn bernstein_unchecked(degree: usize, s: f64) -> Vector {
    let mut b = vec![0.0; degree + 1];
    b[0] = 1.0;
    let r = 1.0 - s;
    for d in 1..=degree {
        for j in (1..=d).rev() {
            b[j] = r * b[j] + s * b[j - 1];
        }
        b[0] *= r;
    }
    Vector::from_vec(b)
}

#[derive(Debug, Clone)]
pub struct BernsteinData {
    degree: usize,
    conversion: Matrix,
    conversion_inverse: Matrix,
    condition_estimate: f64,
}

impl BernsteinData {
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// The conversion matrix `M`; column `i` is `B(t_i / tau)`.
    pub fn conversion(&self) -> &Matrix {
        &self.conversion
    }

    pub fn conversion_inverse(&self) -> &Matrix {
        &self.conversion_inverse
    }

    /// 1-norm condition estimate of `M`.
    pub fn condition_estimate(&self) -> f64 {
        self.condition_estimate
    }

    /// `[value_at_0 | coeffs] M^{-1}`.
    pub fn control_points(&self, value_at_0: &Vector, coeffs: &Matrix) -> Result<Matrix> {
        if coeffs.ncols() != self.degree {
            return Err(dim_err("control_points columns", self.degree, coeffs.ncols()));
        }
        if coeffs.nrows() != value_at_0.len() {
            return Err(dim_err("control_points rows", value_at_0.len(), coeffs.nrows()));
        }
        let mut stacked = Matrix::zeros(coeffs.nrows(), self.degree + 1);
        stacked.column_mut(0).copy_from(value_at_0);
        stacked.columns_mut(1, self.degree).copy_from(coeffs);
        Ok(stacked * &self.conversion_inverse)
    }
}

fn one_norm(a: &Matrix) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Assembles `M` from the collocation nodes of `basis` and inverts it.
pub fn build_bernstein(basis: &InterpolationBasis) -> Result<BernsteinData> {
    let degree = basis.degree();
    let tau = basis.tau();
    let nodes = basis.nodes();
    let mut conversion = Matrix::zeros(degree + 1, degree + 1);
    for (i, &t) in nodes.iter().enumerate() {
        conversion
            .column_mut(i)
            .copy_from(&bernstein_unchecked(degree, (t / tau).clamp(0.0, 1.0)));
    }
    let inverse = conversion.clone().lu().try_inverse();
    let Some(conversion_inverse) = inverse else {
        return Err(Error::SingularBernstein {
            condition: f64::INFINITY,
        });
    };
    let condition_estimate = one_norm(&conversion) * one_norm(&conversion_inverse);
    if !condition_estimate.is_finite() || condition_estimate > MAX_CONDITION {
        return Err(Error::SingularBernstein {
            condition: condition_estimate,
        });
    }
    Ok(BernsteinData {
        degree,
        conversion,
        conversion_inverse,
        condition_estimate,
    })
}

/// Free-function form of [`BernsteinData::control_points`].
pub fn control_points(data: &BernsteinData, value_at_0: &Vector, coeffs: &Matrix) -> Result<Matrix> {
    data.control_points(value_at_0, coeffs)
}
