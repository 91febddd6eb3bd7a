//! Shifted Legendre polynomials, left Radau collocation nodes and the
//! Lagrange cardinal basis built on them.

use nalgebra::{DMatrix, DVector};

use crate::error::{dim_err, Error, Result};
use crate::linalg::{Matrix, Vector};

pub const MIN_DEGREE: usize = 1;
pub const MAX_DEGREE: usize = 20;

const NODE_RESIDUAL_TOL: f64 = 1e-12;

fn check_time(t: f64, tau: f64) -> Result<()> {
    let slack = 1e-12 * tau.max(1.0);
    if !(t >= -slack && t <= tau + slack) {
        return Err(Error::OutOfDomain {
            name: "t",
            value: t,
            lower: 0.0,
            upper: tau,
        });
    }
    Ok(())
}

/// Standard Legendre polynomial `L_k(s)` and its derivative via the
/// three-term recurrence.
pub fn legendre_with_derivative(k: usize, s: f64) -> (f64, f64) {
    if k == 0 {
        return (1.0, 0.0);
    }
    let (mut p_prev, mut p) = (1.0, s);
    let (mut d_prev, mut d) = (0.0, 1.0);
    for j in 1..k {
        let jf = j as f64;
        let p_next = ((2.0 * jf + 1.0) * s * p - jf * p_prev) / (jf + 1.0);
        let d_next = d_prev + (2.0 * jf + 1.0) * p;
        p_prev = p;
        p = p_next;
        d_prev = d;
        d = d_next;
    }
    (p, d)
}

/// Shifted Legendre polynomial `L_k(2t/tau - 1)` on `[0, tau]`.
pub fn shifted_legendre_eval(k: usize, tau: f64, t: f64) -> Result<f64> {
    check_time(t, tau)?;
    Ok(legendre_with_derivative(k, 2.0 * t / tau - 1.0).0)
}

fn radau_poly(n: usize, s: f64) -> (f64, f64) {
    let (a, da) = legendre_with_derivative(n, s);
    let (b, db) = legendre_with_derivative(n + 1, s);
    (a + b, da + db)
}

/// The `N + 1` roots of `L_N + L_{N+1}` in the standard variable `s`, sorted,
/// with `s = -1` pinned exactly.
fn radau_roots_standard(n: usize) -> Result<Vec<f64>> {
    // (L_N + L_{N+1})(s) = c (1 + s) P_N^{(0,1)}(s); the interior roots are the
    // eigenvalues of the symmetric Jacobi matrix of the (0, 1) weight.
    let jacobi = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            let k = i as f64;
            1.0 / ((2.0 * k + 1.0) * (2.0 * k + 3.0))
        } else if i + 1 == j || j + 1 == i {
            let k = i.max(j) as f64;
            (k * (k + 1.0)).sqrt() / (2.0 * k + 1.0)
        } else {
            0.0
        }
    });
    let eig = jacobi.symmetric_eigenvalues();
    let mut roots: Vec<f64> = eig.iter().cloned().collect();
    for r in roots.iter_mut() {
        for _ in 0..2 {
            let (f, df) = radau_poly(n, *r);
            if df == 0.0 {
                break;
            }
            let cand = *r - f / df;
            if radau_poly(n, cand).0.abs() <= f.abs() {
                *r = cand;
            }
        }
    }
    roots.push(-1.0);
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(roots)
}

/// Left Radau collocation nodes on `[0, tau)`: the roots of the shifted
/// `L_N + L_{N+1}`, ascending, first node exactly zero.
pub fn radau_nodes(n: usize, tau: f64) -> Result<Vec<f64>> {
    if !(MIN_DEGREE..=MAX_DEGREE).contains(&n) {
        return Err(Error::UnsupportedDegree(n));
    }
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::OutOfDomain {
            name: "tau",
            value: tau,
            lower: 0.0,
            upper: f64::INFINITY,
        });
    }
    let roots = radau_roots_standard(n)?;
    let mut worst = 0.0_f64;
    for &s in &roots {
        worst = worst.max(radau_poly(n, s).0.abs());
    }
    if worst > NODE_RESIDUAL_TOL {
        return Err(Error::RootFinding { residual: worst });
    }
    for w in roots.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::RootFinding { residual: worst });
        }
    }
    let mut nodes: Vec<f64> = roots.iter().map(|s| tau * (s + 1.0) / 2.0).collect();
    nodes[0] = 0.0;
    Ok(nodes)
}

/// Lagrange cardinal basis on the Radau nodes of one segment, together with
/// the derivative data the interpolation operator is assembled from.
#[derive(Debug, Clone)]
pub struct InterpolationBasis {
    degree: usize,
    tau: f64,
    nodes: Vec<f64>,
    /// `1 / prod_{k != i} (t_i - t_k)`.
    weights: Vec<f64>,
    /// `diff[(i, j)] = phi_i'(t_j)` for `i, j = 0..=N`.
    diff: Matrix,
    phi0_at_tau: f64,
    phi_at_tau: Vector,
}

impl InterpolationBasis {
    pub fn new(degree: usize, tau: f64) -> Result<Self> {
        let nodes = radau_nodes(degree, tau)?;
        let np = degree + 1;
        let weights: Vec<f64> = (0..np)
            .map(|i| {
                1.0 / (0..np)
                    .filter(|&k| k != i)
                    .map(|k| nodes[i] - nodes[k])
                    .product::<f64>()
            })
            .collect();
        let mut diff = Matrix::zeros(np, np);
        for j in 0..np {
            for i in 0..np {
                diff[(i, j)] = if i == j {
                    (0..np)
                        .filter(|&k| k != j)
                        .map(|k| 1.0 / (nodes[j] - nodes[k]))
                        .sum()
                } else {
                    (weights[i] / weights[j]) / (nodes[j] - nodes[i])
                };
            }
        }
        let mut basis = Self {
            degree,
            tau,
            nodes,
            weights,
            diff,
            phi0_at_tau: 0.0,
            phi_at_tau: Vector::zeros(degree),
        };
        let at_tau = basis.phi_values_unchecked(tau);
        basis.phi0_at_tau = at_tau[0];
        basis.phi_at_tau = Vector::from_iterator(degree, at_tau.iter().skip(1).cloned());
        Ok(basis)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// `phi_0(tau)`.
    pub fn phi0_at_tau(&self) -> f64 {
        self.phi0_at_tau
    }

    /// `phi_0'(0)`.
    pub fn phi0_dot_at_0(&self) -> f64 {
        self.diff[(0, 0)]
    }

    /// `sigma = (phi_0'(t_1), ..., phi_0'(t_N))`.
    pub fn sigma(&self) -> Vector {
        Vector::from_iterator(self.degree, (1..=self.degree).map(|j| self.diff[(0, j)]))
    }

    /// `Phi(tau) = (phi_1(tau), ..., phi_N(tau))`.
    pub fn phi_at_tau(&self) -> &Vector {
        &self.phi_at_tau
    }

    /// `Phi'(0)`.
    pub fn phi_dot_at_0(&self) -> Vector {
        Vector::from_iterator(self.degree, (1..=self.degree).map(|i| self.diff[(i, 0)]))
    }

    /// `Psi = [Phi'(t_1) ... Phi'(t_N)]`, so `Psi[(i-1, j-1)] = phi_i'(t_j)`.
    pub fn psi(&self) -> Matrix {
        self.diff.view((1, 1), (self.degree, self.degree)).into_owned()
    }

    /// Full derivative table `phi_i'(t_j)`, `i, j = 0..=N`.
    pub fn differentiation_matrix(&self) -> &Matrix {
        &self.diff
    }

    fn phi_values_unchecked(&self, t: f64) -> Vec<f64> {
        let np = self.degree + 1;
        (0..np)
            .map(|i| {
                let mut p = 1.0;
                for k in 0..np {
                    if k != i {
                        p *= (t - self.nodes[k]) / (self.nodes[i] - self.nodes[k]);
                    }
                }
                p
            })
            .collect()
    }

    /// `(phi_0(t), ..., phi_N(t))`.
    pub fn phi_values(&self, t: f64) -> Result<Vec<f64>> {
        check_time(t, self.tau)?;
        Ok(self.phi_values_unchecked(t))
    }

    /// `(phi_0'(t), ..., phi_N'(t))`, differentiating the product formula
    /// term by term.
    pub fn phi_dot_values(&self, t: f64) -> Result<Vec<f64>> {
        check_time(t, self.tau)?;
        let np = self.degree + 1;
        if let Some(j) = self.nodes.iter().position(|&x| x == t) {
            return Ok((0..np).map(|i| self.diff[(i, j)]).collect());
        }
        Ok((0..np)
            .map(|i| {
                let mut total = 0.0;
                for k in 0..np {
                    if k == i {
                        continue;
                    }
                    let mut p = 1.0 / (self.nodes[i] - self.nodes[k]);
                    for j in 0..np {
                        if j != i && j != k {
                            p *= (t - self.nodes[j]) / (self.nodes[i] - self.nodes[j]);
                        }
                    }
                    total += p;
                }
                total
            })
            .collect())
    }

    /// Barycentric weights of the nodes.
    pub fn barycentric_weights(&self) -> &[f64] {
        &self.weights
    }

    /// Monomial coefficients of each `phi_i` in the normalized variable
    /// `s = t / tau`: row `i`, column `p` is the coefficient of `s^p`.
    pub fn monomial_coefficients(&self) -> Matrix {
        let np = self.degree + 1;
        let s_nodes: Vec<f64> = self.nodes.iter().map(|t| t / self.tau).collect();
        let mut out = Matrix::zeros(np, np);
        for i in 0..np {
            let mut poly = vec![1.0];
            for k in 0..np {
                if k == i {
                    continue;
                }
                let denom = s_nodes[i] - s_nodes[k];
                let mut next = vec![0.0; poly.len() + 1];
                for (p, &c) in poly.iter().enumerate() {
                    next[p + 1] += c / denom;
                    next[p] -= c * s_nodes[k] / denom;
                }
                poly = next;
            }
            for (p, c) in poly.into_iter().enumerate() {
                out[(i, p)] = c;
            }
        }
        out
    }

    fn check_segment_dims(&self, value_at_0: &Vector, coeffs: &Matrix) -> Result<()> {
        if coeffs.ncols() != self.degree {
            return Err(dim_err("segment coefficient columns", self.degree, coeffs.ncols()));
        }
        if coeffs.nrows() != value_at_0.len() {
            return Err(dim_err("segment coefficient rows", value_at_0.len(), coeffs.nrows()));
        }
        Ok(())
    }

    /// `value_at_0 * phi_0(t) + coeffs * Phi(t)` for `t` in `[0, tau]`.
    pub fn eval_segment_poly(&self, value_at_0: &Vector, coeffs: &Matrix, t: f64) -> Result<Vector> {
        self.check_segment_dims(value_at_0, coeffs)?;
        let phi = self.phi_values(t)?;
        let tail = DVector::from_column_slice(&phi[1..]);
        Ok(value_at_0 * phi[0] + coeffs * tail)
    }

    /// Time derivative of [`eval_segment_poly`](Self::eval_segment_poly).
    pub fn eval_segment_derivative(
        &self,
        value_at_0: &Vector,
        coeffs: &Matrix,
        t: f64,
    ) -> Result<Vector> {
        self.check_segment_dims(value_at_0, coeffs)?;
        let d = self.phi_dot_values(t)?;
        let tail = DVector::from_column_slice(&d[1..]);
        Ok(value_at_0 * d[0] + coeffs * tail)
    }
}

/// Builds the cardinal basis for degree `n` on `[0, tau]`.
pub fn build_basis(n: usize, tau: f64) -> Result<InterpolationBasis> {
    InterpolationBasis::new(n, tau)
}

/// Free-function form of [`InterpolationBasis::eval_segment_poly`].
pub fn eval_segment_poly(
    basis: &InterpolationBasis,
    value_at_0: &Vector,
    coeffs: &Matrix,
    t: f64,
) -> Result<Vector> {
    basis.eval_segment_poly(value_at_0, coeffs, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{dmatrix, dvector};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn shifted_legendre_examples() {
        assert_eq!(shifted_legendre_eval(0, 2.0, 0.7).unwrap(), 1.0);
        assert_eq!(shifted_legendre_eval(1, 2.0, 2.0).unwrap(), 1.0);
        assert_eq!(shifted_legendre_eval(1, 2.0, 0.0).unwrap(), -1.0);
        assert!((shifted_legendre_eval(2, 3.0, 1.5).unwrap() + 0.5).abs() < 1e-15);
        assert!(shifted_legendre_eval(2, 1.0, 1.5).is_err());
        assert!(shifted_legendre_eval(2, 1.0, -0.1).is_err());
    }

    #[test]
    fn legendre_derivative_matches_closed_form() {
        // L_3 = (5s^3 - 3s)/2, L_3' = (15 s^2 - 3)/2
        let s = 0.37;
        let (p, d) = legendre_with_derivative(3, s);
        assert!((p - (5.0 * s * s * s - 3.0 * s) / 2.0).abs() < 1e-15);
        assert!((d - (15.0 * s * s - 3.0) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn radau_nodes_examples() {
        let n1 = radau_nodes(1, 1.0).unwrap();
        assert_eq!(n1[0], 0.0);
        assert!((n1[1] - 2.0 / 3.0).abs() < 1e-12);
        let n3 = radau_nodes(1, 3.0).unwrap();
        assert!((n3[1] - 2.0).abs() < 1e-12);
        for n in 1..=MAX_DEGREE {
            let nodes = radau_nodes(n, 1.0).unwrap();
            assert_eq!(nodes.len(), n + 1);
            assert_eq!(nodes[0], 0.0);
            assert!(*nodes.last().unwrap() < 1.0);
            assert!(nodes.windows(2).all(|w| w[0] < w[1]));
        }
        // N = 2 closed form: s = (1 ± sqrt 6)/5
        let n2 = radau_nodes(2, 2.0).unwrap();
        assert!((n2[1] - (1.0 + (1.0 - 6f64.sqrt()) / 5.0)).abs() < 1e-13);
        assert!((n2[2] - (1.0 + (1.0 + 6f64.sqrt()) / 5.0)).abs() < 1e-13);
    }

    #[test]
    fn radau_node_residuals() {
        for n in 1..=MAX_DEGREE {
            for &tau in &[0.3, 1.0, 7.5] {
                for &t in &radau_nodes(n, tau).unwrap() {
                    let r = shifted_legendre_eval(n, tau, t).unwrap()
                        + shifted_legendre_eval(n + 1, tau, t).unwrap();
                    assert!(r.abs() <= 1e-12, "N={n} tau={tau} residual {r}");
                }
            }
        }
    }

    #[test]
    fn degree_range_enforced() {
        assert!(matches!(radau_nodes(0, 1.0), Err(Error::UnsupportedDegree(0))));
        assert!(matches!(radau_nodes(21, 1.0), Err(Error::UnsupportedDegree(21))));
        assert!(radau_nodes(3, 0.0).is_err());
    }

    #[test]
    fn degree_one_basis_data() {
        // nodes {0, 2/3}: phi_0 = 1 - 3t/2, phi_1 = 3t/2
        let b = build_basis(1, 1.0).unwrap();
        assert!((b.sigma()[0] + 1.5).abs() < 1e-12);
        assert!((b.psi()[(0, 0)] - 1.5).abs() < 1e-12);
        assert!((b.phi_at_tau()[0] - 1.5).abs() < 1e-12);
        assert!((b.phi0_at_tau() + 0.5).abs() < 1e-12);
        assert!((b.phi_dot_at_0()[0] - 1.5).abs() < 1e-12);
        assert!((b.phi0_dot_at_0() + 1.5).abs() < 1e-12);
    }

    #[test]
    fn derivative_rows_sum_to_zero() {
        for n in 1..=12 {
            let b = build_basis(n, 1.7).unwrap();
            let d = b.differentiation_matrix();
            for j in 0..=n {
                let s: f64 = (0..=n).map(|i| d[(i, j)]).sum();
                assert!(s.abs() < 1e-9 * (n * n) as f64, "N={n} col {j}: {s}");
            }
            assert!(b.phi_dot_values(0.9).unwrap().iter().sum::<f64>().abs() < 1e-9);
            let at0 = b.phi_values(0.0).unwrap();
            assert_eq!(at0[0], 1.0);
            assert!(at0[1..].iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn cardinal_identity() {
        for n in 1..=8 {
            let b = build_basis(n, 2.5).unwrap();
            for (j, &t) in b.nodes().iter().enumerate() {
                let phi = b.phi_values(t).unwrap();
                for (i, v) in phi.iter().enumerate() {
                    let e = if i == j { 1.0 } else { 0.0 };
                    assert!((v - e).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn node_derivatives_match_general_formula() {
        let b = build_basis(6, 1.3).unwrap();
        // Nudge off the node so the general path runs; derivative is smooth.
        for (j, &t) in b.nodes().iter().enumerate().skip(1) {
            let general = b.phi_dot_values(t - 1e-9).unwrap();
            for i in 0..=6 {
                let at = b.differentiation_matrix()[(i, j)];
                assert!((general[i] - at).abs() < 1e-5 * at.abs().max(1.0));
            }
        }
    }

    #[test]
    fn eval_segment_examples() {
        let b = build_basis(1, 1.0).unwrap();
        let v0 = dvector![1.0];
        let c = dmatrix![4.0];
        assert!((b.eval_segment_poly(&v0, &c, 0.0).unwrap()[0] - 1.0).abs() < 1e-15);
        assert!((b.eval_segment_poly(&v0, &c, 2.0 / 3.0).unwrap()[0] - 4.0).abs() < 1e-12);
        assert!((b.eval_segment_poly(&v0, &c, 1.0).unwrap()[0] - 5.5).abs() < 1e-12);
        assert!(b.eval_segment_poly(&v0, &c, 1.2).is_err());
        assert!(b.eval_segment_poly(&v0, &dmatrix![1.0, 2.0], 0.5).is_err());
    }

    #[test]
    fn interpolates_polynomials_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..=10 {
            let tau = 1.9;
            let b = build_basis(n, tau).unwrap();
            let coeffs: Vec<f64> = (0..=n).map(|_| rng.random_range(-2.0..2.0)).collect();
            let p = |t: f64| coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c);
            let dp = |t: f64| {
                coeffs
                    .iter()
                    .enumerate()
                    .skip(1)
                    .map(|(k, c)| k as f64 * c * t.powi(k as i32 - 1))
                    .sum::<f64>()
            };
            let v0 = dvector![p(0.0)];
            let c = Matrix::from_fn(1, n, |_, j| p(b.nodes()[j + 1]));
            for _ in 0..50 {
                let t = rng.random_range(0.0..tau);
                let v = b.eval_segment_poly(&v0, &c, t).unwrap()[0];
                assert!((v - p(t)).abs() < 1e-9, "N={n}");
                let dv = b.eval_segment_derivative(&v0, &c, t).unwrap()[0];
                assert!((dv - dp(t)).abs() < 1e-7 * dp(t).abs().max(1.0), "N={n}");
            }
        }
    }

    #[test]
    fn monomial_expansion_matches_product_form() {
        let b = build_basis(7, 2.0).unwrap();
        let mono = b.monomial_coefficients();
        for &t in &[0.0, 0.3, 1.1, 2.0] {
            let s = t / 2.0;
            let phi = b.phi_values(t).unwrap();
            for i in 0..=7 {
                let v: f64 = (0..=7).rev().fold(0.0, |acc, p| acc * s + mono[(i, p)]);
                assert!((v - phi[i]).abs() < 1e-10);
            }
        }
    }
}
