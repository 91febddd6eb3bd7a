//! Dense matrix primitives: vectorization, Kronecker products, minimum-norm
//! least squares, image inclusion and the matrix exponential.
//!
//! Matrices are `nalgebra::DMatrix<f64>`, which stores entries column-major,
//! so `vec(M)` is the raw storage slice.

use nalgebra::{DMatrix, DVector};

use crate::error::{dim_err, Error, Result};

pub type Matrix = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Default relative threshold below which singular values count as zero.
pub const DEFAULT_RANK_RTOL: f64 = 1e-8;

/// Stacks the columns of `m` into one vector.
pub fn vec(m: &Matrix) -> Vector {
    Vector::from_column_slice(m.as_slice())
}

/// Borrowed view of `vec(m)`; free because storage is column-major.
pub fn vec_view(m: &Matrix) -> &[f64] {
    m.as_slice()
}

/// Inverse of [`vec`]: refolds a vector of length `rows * cols`.
pub fn unvec(v: &[f64], rows: usize, cols: usize) -> Result<Matrix> {
    if v.len() != rows * cols {
        return Err(dim_err("unvec", rows * cols, v.len()));
    }
    Ok(Matrix::from_column_slice(rows, cols, v))
}

/// Ordered list of the columns of `m`.
pub fn col(m: &Matrix) -> Vec<Vector> {
    m.column_iter().map(|c| c.into_owned()).collect()
}

/// Kronecker product; block `(i, j)` of the result is `a[(i, j)] * b`.
pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let mut out = Matrix::zeros(ar * br, ac * bc);
    for j in 0..ac {
        for i in 0..ar {
            let s = a[(i, j)];
            if s == 0.0 {
                continue;
            }
            out.view_mut((i * br, j * bc), (br, bc)).copy_from(&(b * s));
        }
    }
    out
}

/// Kronecker sum `n ⊗ I + I ⊗ m` of two square matrices.
pub fn kron_sum(n: &Matrix, m: &Matrix) -> Result<Matrix> {
    if !n.is_square() {
        return Err(Error::NotSquare {
            context: "kron_sum (left)",
            rows: n.nrows(),
            cols: n.ncols(),
        });
    }
    if !m.is_square() {
        return Err(Error::NotSquare {
            context: "kron_sum (right)",
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    let im = Matrix::identity(m.nrows(), m.nrows());
    let in_ = Matrix::identity(n.nrows(), n.nrows());
    Ok(kron(n, &im) + kron(&in_, m))
}

/// Outcome of a least-squares solve.
#[derive(Debug, Clone)]
pub struct LinearSolveReport {
    pub solution: Matrix,
    /// Frobenius norm of `A * solution - B`, recomputed after solving.
    pub residual_norm: f64,
    pub rank_estimate: usize,
}

/// Precomputed pseudo-inverse of a fixed matrix.
///
/// Solving through the stored pseudo-inverse is a single matrix product, so
/// the map `B -> X` is linear, deterministic and bit-identical across calls.
#[derive(Debug, Clone)]
pub struct MinNormSolver {
    a: Matrix,
    pinv: Matrix,
    rank: usize,
    singular_values: Vector,
    range_basis: Matrix,
}

impl MinNormSolver {
    pub fn new(a: &Matrix) -> Self {
        Self::with_rank_tolerance(a, DEFAULT_RANK_RTOL)
    }

    pub fn with_rank_tolerance(a: &Matrix, rtol: f64) -> Self {
        Self::with_tolerances(a, rtol, 0.0)
    }

    /// Singular values at or below `max(rtol * s_max, atol)` are treated as
    /// zero. The absolute floor keeps matrices that are zero up to round-off
    /// from being inverted.
    pub fn with_tolerances(a: &Matrix, rtol: f64, atol: f64) -> Self {
        let (rows, cols) = a.shape();
        if rows == 0 || cols == 0 {
            return Self {
                a: a.clone(),
                pinv: Matrix::zeros(cols, rows),
                rank: 0,
                singular_values: Vector::zeros(0),
                range_basis: Matrix::zeros(rows, 0),
            };
        }
        let svd = a.clone().svd(true, true);
        let u = svd.u.as_ref().expect("left singular vectors requested");
        let v_t = svd.v_t.as_ref().expect("right singular vectors requested");
        let sigma = &svd.singular_values;
        let smax = sigma.iter().cloned().fold(0.0_f64, f64::max);
        let cutoff = (rtol * smax).max(atol);

        let mut pinv = Matrix::zeros(cols, rows);
        let mut rank = 0;
        let mut kept = Vec::new();
        for (k, &s) in sigma.iter().enumerate() {
            if s <= cutoff || s == 0.0 {
                continue;
            }
            rank += 1;
            kept.push(u.column(k).into_owned());
            // pinv += v_k * u_k^T / s_k
            let vk = v_t.row(k).transpose();
            let uk = u.column(k);
            pinv.ger(1.0 / s, &vk, &uk, 1.0);
        }
        Self {
            a: a.clone(),
            pinv,
            rank,
            singular_values: sigma.clone(),
            range_basis: if kept.is_empty() {
                Matrix::zeros(rows, 0)
            } else {
                Matrix::from_columns(&kept)
            },
        }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.a
    }

    pub fn pseudo_inverse(&self) -> &Matrix {
        &self.pinv
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Orthonormal basis of the numerical range, `rows x rank`.
    pub fn range_basis(&self) -> &Matrix {
        &self.range_basis
    }

    /// Orthogonal projector onto the complement of the numerical range;
    /// exactly zero at full row rank.
    pub fn complement_projector(&self) -> Matrix {
        let rows = self.a.nrows();
        if self.rank == rows {
            return Matrix::zeros(rows, rows);
        }
        Matrix::identity(rows, rows) - &self.range_basis * self.range_basis.transpose()
    }

    pub fn singular_values(&self) -> &Vector {
        &self.singular_values
    }

    /// Minimum-Frobenius-norm `X` with `A X ≈ B`.
    pub fn solve(&self, b: &Matrix) -> Result<LinearSolveReport> {
        if b.nrows() != self.a.nrows() {
            return Err(dim_err("solve_min_norm rhs rows", self.a.nrows(), b.nrows()));
        }
        let solution = &self.pinv * b;
        let residual_norm = (&self.a * &solution - b).norm();
        Ok(LinearSolveReport {
            solution,
            residual_norm,
            rank_estimate: self.rank,
        })
    }

    pub fn solve_vector(&self, b: &Vector) -> Result<(Vector, f64)> {
        if b.len() != self.a.nrows() {
            return Err(dim_err("solve_min_norm rhs length", self.a.nrows(), b.len()));
        }
        let x = &self.pinv * b;
        let r = (&self.a * &x - b).norm();
        Ok((x, r))
    }
}

/// Minimum-norm least-squares solution of `A X = B` (pseudo-inverse semantics).
pub fn solve_min_norm(a: &Matrix, b: &Matrix) -> Result<LinearSolveReport> {
    if a.nrows() != b.nrows() {
        return Err(dim_err("solve_min_norm", a.nrows(), b.nrows()));
    }
    MinNormSolver::new(a).solve(b)
}

/// True iff every column of `b` lies in the column space of `a`, up to a
/// residual of `tol * max(1, |b_j|)`.
pub fn image_contained(b: &Matrix, a: &Matrix, tol: f64) -> Result<bool> {
    if a.nrows() != b.nrows() {
        return Err(dim_err("image_contained", a.nrows(), b.nrows()));
    }
    Ok(image_contained_with(b, &MinNormSolver::new(a), tol))
}

pub(crate) fn image_contained_with(b: &Matrix, solver: &MinNormSolver, tol: f64) -> bool {
    let x = solver.pseudo_inverse() * b;
    let r = solver.matrix() * &x - b;
    r.column_iter()
        .zip(b.column_iter())
        .all(|(rj, bj)| rj.norm() <= tol * bj.norm().max(1.0))
}

// Scaling-and-squaring thresholds for Padé degrees 3, 5, 7, 9 and 13.
const PADE_THETA: [(usize, f64); 5] = [
    (3, 1.495_585_217_958_292e-2),
    (5, 2.539_398_330_063_23e-1),
    (7, 9.504_178_996_162_932e-1),
    (9, 2.097_847_961_257_068),
    (13, 5.371_920_351_148_152),
];

fn pade_coefficients(m: usize) -> Vec<f64> {
    // b_j = (2m - j)! m! / ((2m)! j! (m - j)!), built by the ratio recurrence.
    let mut b = vec![1.0; m + 1];
    for j in 1..=m {
        b[j] = b[j - 1] * ((m + 1 - j) as f64) / ((j * (2 * m + 1 - j)) as f64);
    }
    b
}

fn one_norm(a: &Matrix) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Matrix exponential by scaling and squaring with a Padé approximant of
/// degree up to 13.
pub fn expm(a: &Matrix) -> Result<Matrix> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            context: "expm",
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    if a.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("expm input"));
    }
    let n = a.nrows();
    if n == 0 {
        return Ok(Matrix::zeros(0, 0));
    }
    let norm = one_norm(a);
    for &(m, theta) in &PADE_THETA[..4] {
        if norm <= theta {
            return Ok(pade_low(a, m));
        }
    }
    let theta13 = PADE_THETA[4].1;
    let s = if norm > theta13 {
        (norm / theta13).log2().ceil().max(0.0) as i32
    } else {
        0
    };
    let scaled = a * 2f64.powi(-s);
    let mut r = pade13(&scaled);
    for _ in 0..s {
        r = &r * &r;
    }
    Ok(r)
}

fn pade_low(a: &Matrix, m: usize) -> Matrix {
    let n = a.nrows();
    let b = pade_coefficients(m);
    let eye = Matrix::identity(n, n);
    let a2 = a * a;
    // Even powers A^0, A^2, A^4, ...
    let mut pows = vec![eye.clone(), a2.clone()];
    while pows.len() <= m / 2 {
        let next = pows.last().unwrap() * &a2;
        pows.push(next);
    }
    let mut u_inner = Matrix::zeros(n, n);
    let mut v = Matrix::zeros(n, n);
    for k in 0..=m / 2 {
        v += &pows[k] * b[2 * k];
        if 2 * k + 1 <= m {
            u_inner += &pows[k] * b[2 * k + 1];
        }
    }
    let u = a * u_inner;
    pade_solve(&v, &u)
}

fn pade13(a: &Matrix) -> Matrix {
    let n = a.nrows();
    let b = pade_coefficients(13);
    let eye = Matrix::identity(n, n);
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a2 * &a4;
    let w1 = &a6 * b[13] + &a4 * b[11] + &a2 * b[9];
    let w2 = &a6 * b[7] + &a4 * b[5] + &a2 * b[3] + &eye * b[1];
    let u = a * (&a6 * w1 + w2);
    let z1 = &a6 * b[12] + &a4 * b[10] + &a2 * b[8];
    let z2 = &a6 * b[6] + &a4 * b[4] + &a2 * b[2] + &eye * b[0];
    let v = &a6 * z1 + z2;
    pade_solve(&v, &u)
}

fn pade_solve(v: &Matrix, u: &Matrix) -> Matrix {
    let p = v + u;
    let q = v - u;
    // q is well conditioned for the chosen theta thresholds.
    q.lu()
        .solve(&p)
        .expect("Padé denominator is nonsingular within the scaling thresholds")
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dmatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(rng: &mut ChaCha8Rng, r: usize, c: usize) -> Matrix {
        Matrix::from_fn(r, c, |_, _| rng.random_range(-1.0..1.0))
    }

    #[test]
    fn vec_examples() {
        let m = dmatrix![1.0, 3.0; 2.0, 4.0];
        assert_eq!(vec(&m).as_slice(), &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(vec(&Matrix::zeros(2, 3)), Vector::zeros(6));
        let c = Matrix::from_column_slice(3, 1, &[7.0, 8.0, 9.0]);
        assert_eq!(vec_view(&c), &[7.0, 8.0, 9.0]);
    }

    #[test]
    fn col_examples() {
        let m = dmatrix![1.0, 3.0; 2.0, 4.0];
        let cols = col(&m);
        assert_eq!(cols[0].as_slice(), &[1.0, 2.0]);
        assert_eq!(cols[1].as_slice(), &[3.0, 4.0]);
        let id = col(&Matrix::identity(2, 2));
        assert_eq!(id[0].as_slice(), &[1.0, 0.0]);
        assert_eq!(id[1].as_slice(), &[0.0, 1.0]);
        assert_eq!(col(&dmatrix![5.0])[0].as_slice(), &[5.0]);
    }

    #[test]
    fn kron_examples() {
        let b = dmatrix![1.0, 2.0; 3.0, 4.0];
        let k = kron(&Matrix::identity(2, 2), &b);
        let mut expected = Matrix::zeros(4, 4);
        expected.view_mut((0, 0), (2, 2)).copy_from(&b);
        expected.view_mut((2, 2), (2, 2)).copy_from(&b);
        assert_eq!(k, expected);
        assert_eq!(kron(&dmatrix![2.0], &dmatrix![3.0]), dmatrix![6.0]);
    }

    #[test]
    fn kron_matches_quadruple_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = random(&mut rng, 2, 2);
        let b = random(&mut rng, 3, 1);
        let k = kron(&a, &b);
        for i in 0..2 {
            for j in 0..2 {
                for p in 0..3 {
                    for q in 0..1 {
                        assert_eq!(k[(i * 3 + p, j + q)], a[(i, j)] * b[(p, q)]);
                    }
                }
            }
        }
    }

    #[test]
    fn kron_sum_examples() {
        assert_eq!(kron_sum(&dmatrix![2.0], &dmatrix![3.0]).unwrap(), dmatrix![5.0]);
        let m = dmatrix![1.0, 2.0; 3.0, 4.0];
        assert_eq!(kron_sum(&dmatrix![0.0], &m).unwrap(), m);
        assert!(matches!(
            kron_sum(&Matrix::zeros(2, 3), &m),
            Err(Error::NotSquare { .. })
        ));
    }

    #[test]
    fn kron_sum_eigenvalues_are_pairwise_sums() {
        // Upper-triangular factors make the characteristic polynomial explicit:
        // eigenvalues are the diagonals, and the sum must have det(K - λI) = 0
        // at every pairwise sum.
        let n = dmatrix![0.5, 1.3; 0.0, -1.2];
        let m = dmatrix![2.0, -0.7; 0.0, 0.25];
        let k = kron_sum(&n, &m).unwrap();
        for &a in &[0.5, -1.2] {
            for &b in &[2.0, 0.25] {
                let shifted = &k - Matrix::identity(4, 4) * (a + b);
                assert!(shifted.determinant().abs() < 1e-12);
            }
        }
        // Random full factors: trace and determinant agree with the sums.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = random(&mut rng, 2, 2);
        let m = random(&mut rng, 2, 2);
        let k = kron_sum(&n, &m).unwrap();
        let ev_n = n.complex_eigenvalues();
        let ev_m = m.complex_eigenvalues();
        let mut prod = nalgebra::Complex::new(1.0, 0.0);
        for a in ev_n.iter() {
            for b in ev_m.iter() {
                prod *= a + b;
            }
        }
        assert!((prod.re - k.determinant()).abs() < 1e-10);
        assert!(prod.im.abs() < 1e-10);
        assert!((k.trace() - 2.0 * (n.trace() + m.trace())).abs() < 1e-12);
    }

    #[test]
    fn min_norm_examples() {
        let b = dmatrix![1.0, 2.0; 3.0, 4.0];
        let r = solve_min_norm(&Matrix::identity(2, 2), &b).unwrap();
        assert!((r.solution - &b).norm() < 1e-14);
        assert!(r.residual_norm < 1e-14);

        // Row space of [1 1] is span{(1,1)}; projecting gives (1,1).
        let r = solve_min_norm(&dmatrix![1.0, 1.0], &dmatrix![2.0]).unwrap();
        assert!((r.solution[0] - 1.0).abs() < 1e-14 && (r.solution[1] - 1.0).abs() < 1e-14);
        assert_eq!(r.rank_estimate, 1);

        // Normal equations: x = (a^T b)/(a^T a) = 1/2, residual (1/2, -1/2).
        let r = solve_min_norm(&dmatrix![1.0; 1.0], &dmatrix![1.0; 0.0]).unwrap();
        assert!((r.solution[0] - 0.5).abs() < 1e-14);
        assert!((r.residual_norm - 0.5_f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn min_norm_is_shortest() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let a = random(&mut rng, 3, 6);
            let x_true = random(&mut rng, 6, 1);
            let b = &a * &x_true;
            let r = solve_min_norm(&a, &b).unwrap();
            assert!(r.residual_norm < 1e-12);
            let solver = MinNormSolver::new(&a);
            for _ in 0..3 {
                // Random nullspace direction w - A^+ A w.
                let w = random(&mut rng, 6, 1);
                let nvec = &w - solver.pseudo_inverse() * (&a * &w);
                assert!((&a * &nvec).amax() < 1e-12);
                assert!((&r.solution + &nvec).norm() >= r.solution.norm());
                assert!(r.solution.dot(&nvec).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn image_contained_examples() {
        let a = dmatrix![1.0, 0.0; 0.0, 1.0; 1.0, 1.0];
        assert!(image_contained(&a, &a, 1e-8).unwrap());
        assert!(image_contained(&Matrix::zeros(3, 2), &a, 1e-8).unwrap());
        let e1 = dmatrix![1.0; 0.0];
        let e2 = dmatrix![0.0; 1.0];
        assert!(!image_contained(&e2, &e1, 1e-8).unwrap());
    }

    #[test]
    fn expm_examples() {
        let z = expm(&Matrix::zeros(3, 3)).unwrap();
        assert_eq!(z, Matrix::identity(3, 3));
        let d = expm(&dmatrix![1.5, 0.0; 0.0, -7.0]).unwrap();
        assert!((d[(0, 0)] - 1.5_f64.exp()).abs() < 1e-12 * 1.5_f64.exp());
        assert!((d[(1, 1)] - (-7.0_f64).exp()).abs() < 1e-12);
        assert!(d[(0, 1)].abs() < 1e-15 && d[(1, 0)].abs() < 1e-15);
        let nil = expm(&dmatrix![0.0, 1.0; 0.0, 0.0]).unwrap();
        assert!((nil - dmatrix![1.0, 1.0; 0.0, 1.0]).norm() < 1e-15);
        let big = expm(&dmatrix![40.0, 0.0; 0.0, 0.0]).unwrap();
        assert!((big[(0, 0)] / 40.0_f64.exp() - 1.0).abs() < 1e-12);
        assert!(matches!(expm(&Matrix::zeros(2, 3)), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn expm_rotation() {
        let t = 2.3_f64;
        let r = expm(&dmatrix![0.0, -t; t, 0.0]).unwrap();
        let e = dmatrix![t.cos(), -t.sin(); t.sin(), t.cos()];
        assert!((r - e).norm() < 1e-13);
    }

    #[test]
    fn pade_coefficients_match_higham() {
        let b = pade_coefficients(13);
        assert!((b[1] - 0.5).abs() < 1e-16);
        assert!((b[2] - 0.12).abs() < 1e-16);
        assert!((b[13] / 1.544_049_750_670_309e-17 - 1.0).abs() < 1e-12);
    }
}

#[cfg(test)]
mod properties {
    use super::*;
    use proptest::prelude::*;

    fn mat(r: usize, c: usize) -> impl Strategy<Value = Matrix> {
        proptest::collection::vec(-3.0..3.0f64, r * c)
            .prop_map(move |v| Matrix::from_column_slice(r, c, &v))
    }

    proptest! {
        #[test]
        fn kron_is_bilinear(a in mat(2, 3), a2 in mat(2, 3), b in mat(3, 2)) {
            let lhs = kron(&(&a + &a2), &b);
            let rhs = kron(&a, &b) + kron(&a2, &b);
            prop_assert!((lhs - rhs).amax() < 1e-12);
        }

        #[test]
        fn vec_of_triple_product(a in mat(2, 3), x in mat(3, 4), b in mat(4, 2)) {
            let lhs = vec(&(&a * &x * &b));
            let rhs = kron(&b.transpose(), &a) * vec(&x);
            prop_assert!((lhs - rhs).amax() < 1e-10);
        }

        #[test]
        fn expm_inverse_pair(a in mat(3, 3)) {
            // entries in [-3, 3] with 3x3 keeps |A| <= ~5 in most draws; rescale to be sure
            let a = if a.norm() > 5.0 { &a * (5.0 / a.norm()) } else { a };
            let p = expm(&a).unwrap() * expm(&(-&a)).unwrap();
            prop_assert!((p - Matrix::identity(3, 3)).amax() < 1e-9);
        }

        #[test]
        fn unvec_inverts_vec(m in mat(3, 5)) {
            prop_assert_eq!(unvec(vec(&m).as_slice(), 3, 5).unwrap(), m);
        }
    }
}
