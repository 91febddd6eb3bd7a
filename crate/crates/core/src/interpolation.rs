//! Interpolation operator of a continuous-time system on the Radau
//! collocation grid, discrete-time model design and per-segment solves.
//!
//! On one segment the state and input are written as
//! `x(t) = x_k φ_0(t) + X Φ(t)` and `u(t) = u_k φ_0(t) + U Φ(t)`. Enforcing
//! the dynamics at every node and matching the next sample gives
//!
//! ```text
//! Q [vec X; vec U] = (R + T1 [A_d B_d] T2) [x_k; u_k; u_{k+1}]
//! ```
//!
//! A continuous system interpolates `(A_d, B_d)` when the right-hand side
//! always lies in the column space of `Q`.

use crate::bernstein::{build_bernstein, BernsteinData};
use crate::error::{dim_err, Error, Result};
use crate::linalg::{image_contained_with, kron, unvec, vec, Matrix, MinNormSolver, Vector};
use crate::poly_basis::{build_basis, InterpolationBasis};
use crate::system::{LtiSystem, TimeDomain};
use crate::trajectory::{PiecewisePolynomial, SegmentPolynomial};

/// Default relative residual threshold shared by all solves.
pub const DEFAULT_RESIDUAL_TOL: f64 = 1e-8;

// Singular values of the projected coupling below this are round-off.
const PROJECTION_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct InterpolationOperator {
    basis: InterpolationBasis,
    bernstein: BernsteinData,
    q: Matrix,
    r: Matrix,
    t1: Matrix,
    t2: Matrix,
    q_solver: MinNormSolver,
    system: LtiSystem,
    n: usize,
    m: usize,
}

/// Builds `Q`, `R`, `T1`, `T2` for `sys_c` on segments of length `tau`.
pub fn build_operator(sys_c: &LtiSystem, degree: usize, tau: f64) -> Result<InterpolationOperator> {
    if sys_c.domain() != TimeDomain::Continuous {
        return Err(Error::InvalidContract("interpolation requires a continuous-time system".into()));
    }
    if !(tau.is_finite() && tau > 0.0) {
        return Err(Error::OutOfDomain {
            name: "tau",
            value: tau,
            lower: 0.0,
            upper: f64::INFINITY,
        });
    }
    let n = sys_c.state_dim();
    let m = sys_c.input_dim();
    if n == 0 || m == 0 {
        return Err(dim_err("state/input dimensions", "n >= 1 and m >= 1", format!("n = {n}, m = {m}")));
    }
    let basis = build_basis(degree, tau)?;
    let bernstein = build_bernstein(&basis)?;
    let nn = degree;
    let a = sys_c.a();
    let b = sys_c.b();
    let i_n = Matrix::identity(n, n);
    let i_m = Matrix::identity(m, m);
    let i_nn = Matrix::identity(nn, nn);

    let rows = n + n * nn + n + m;
    let cols = n * nn + m * nn;
    let mut q = Matrix::zeros(rows, cols);
    let phi_dot0 = Matrix::from_row_slice(1, nn, basis.phi_dot_at_0().as_slice());
    let phi_tau = Matrix::from_row_slice(1, nn, basis.phi_at_tau().as_slice());
    q.view_mut((0, 0), (n, n * nn)).copy_from(&kron(&phi_dot0, &i_n));
    let collocation = kron(&basis.psi().transpose(), &i_n) - kron(&i_nn, a);
    q.view_mut((n, 0), (n * nn, n * nn)).copy_from(&collocation);
    q.view_mut((n, n * nn), (n * nn, m * nn)).copy_from(&(-kron(&i_nn, b)));
    q.view_mut((n + n * nn, 0), (n, n * nn)).copy_from(&kron(&phi_tau, &i_n));
    q.view_mut((2 * n + n * nn, n * nn), (m, m * nn)).copy_from(&kron(&phi_tau, &i_m));

    let mut r = Matrix::zeros(rows, n + 2 * m);
    r.view_mut((0, 0), (n, n)).copy_from(&(a - &i_n * basis.phi0_dot_at_0()));
    r.view_mut((0, n), (n, m)).copy_from(b);
    let sigma = Matrix::from_column_slice(nn, 1, basis.sigma().as_slice());
    r.view_mut((n, 0), (n * nn, n)).copy_from(&(-kron(&sigma, &i_n)));
    r.view_mut((n + n * nn, 0), (n, n)).copy_from(&(&i_n * -basis.phi0_at_tau()));
    r.view_mut((2 * n + n * nn, n), (m, m)).copy_from(&(&i_m * -basis.phi0_at_tau()));
    r.view_mut((2 * n + n * nn, n + m), (m, m)).copy_from(&i_m);

    let mut t1 = Matrix::zeros(rows, n);
    t1.view_mut((n + n * nn, 0), (n, n)).copy_from(&i_n);
    let mut t2 = Matrix::zeros(n + m, n + 2 * m);
    t2.view_mut((0, 0), (n + m, n + m)).fill_with_identity();

    let q_solver = MinNormSolver::new(&q);
    Ok(InterpolationOperator {
        basis,
        bernstein,
        q,
        r,
        t1,
        t2,
        q_solver,
        system: sys_c.clone(),
        n,
        m,
    })
}

impl InterpolationOperator {
    pub fn basis(&self) -> &InterpolationBasis {
        &self.basis
    }

    pub fn bernstein(&self) -> &BernsteinData {
        &self.bernstein
    }

    pub fn q(&self) -> &Matrix {
        &self.q
    }

    pub fn r(&self) -> &Matrix {
        &self.r
    }

    pub fn t1(&self) -> &Matrix {
        &self.t1
    }

    pub fn t2(&self) -> &Matrix {
        &self.t2
    }

    pub fn q_solver(&self) -> &MinNormSolver {
        &self.q_solver
    }

    pub fn system(&self) -> &LtiSystem {
        &self.system
    }

    pub fn state_dim(&self) -> usize {
        self.n
    }

    pub fn input_dim(&self) -> usize {
        self.m
    }

    pub fn degree(&self) -> usize {
        self.basis.degree()
    }

    pub fn tau(&self) -> f64 {
        self.basis.tau()
    }

    fn check_discrete(&self, sys_d: &LtiSystem) -> Result<()> {
        if sys_d.state_dim() != self.n || sys_d.input_dim() != self.m {
            return Err(dim_err(
                "discrete system dimensions",
                format!("({}, {})", self.n, self.m),
                format!("({}, {})", sys_d.state_dim(), sys_d.input_dim()),
            ));
        }
        Ok(())
    }

    /// `R + T1 [A_d B_d] T2`.
    pub fn right_hand_side(&self, sys_d: &LtiSystem) -> Result<Matrix> {
        self.check_discrete(sys_d)?;
        Ok(&self.r + &self.t1 * sys_d.stacked() * &self.t2)
    }

    /// Linear map `[x_k; u_k; u_{k+1}] -> [vec X; vec U]` of the segment
    /// solve, `Q^+ (R + T1 [A_d B_d] T2)`.
    pub fn segment_map(&self, sys_d: &LtiSystem) -> Result<Matrix> {
        Ok(self.q_solver.pseudo_inverse() * self.right_hand_side(sys_d)?)
    }
}

/// How to pick `[A_d B_d]` among all interpolated discrete systems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DesignSelection {
    /// Closest (Frobenius) to the zero-order-hold sampled system.
    #[default]
    SampledDataAnchored,
    /// Minimum-norm solution of the joint linear system in `(vec V, vec K)`.
    MinNorm,
}

#[derive(Debug, Clone)]
pub struct DiscreteDesign {
    pub system: LtiSystem,
    /// `min_K |P (R + T1 K T2)|_F / max(1, |R|_F)` with `P` the projector onto
    /// the orthogonal complement of the range of `Q`.
    pub relative_residual: f64,
}

/// Designs `(A_d, B_d)` with the default selection and tolerance.
pub fn design_discrete(op: &InterpolationOperator) -> Result<LtiSystem> {
    Ok(design_discrete_with(op, DesignSelection::default(), DEFAULT_RESIDUAL_TOL)?.system)
}

/// Finds `K = [A_d B_d]` with `range(R + T1 K T2) ⊆ range(Q)`.
///
/// Fails with [`Error::InfeasibleOrder`] when the least-squares residual of
/// that condition exceeds `tol` relative to `|R|`; a larger degree usually
/// helps.
pub fn design_discrete_with(
    op: &InterpolationOperator,
    selection: DesignSelection,
    tol: f64,
) -> Result<DiscreteDesign> {
    let n = op.n;
    let m = op.m;
    let p = op.q_solver.complement_projector();
    let pr = &p * &op.r;
    let c = kron(&op.t2.transpose(), &(&p * &op.t1));
    let target = -vec(&pr);
    let scale = op.r.norm().max(1.0);

    let k_vec = match selection {
        DesignSelection::SampledDataAnchored => {
            let reference = op.system.zero_order_hold(op.tau())?.stacked();
            let k_ref = vec(&reference);
            let solver = MinNormSolver::with_tolerances(&c, crate::linalg::DEFAULT_RANK_RTOL, PROJECTION_FLOOR);
            let (delta, _) = solver.solve_vector(&(&target - &c * &k_ref))?;
            k_ref + delta
        }
        DesignSelection::MinNorm => {
            // [I ⊗ Q | -T2^T ⊗ T1] [vec V; vec K] = vec R
            let w = op.r.ncols();
            let big_q = kron(&Matrix::identity(w, w), &op.q);
            let coupling = -kron(&op.t2.transpose(), &op.t1);
            let mut joint = Matrix::zeros(big_q.nrows(), big_q.ncols() + coupling.ncols());
            joint.columns_mut(0, big_q.ncols()).copy_from(&big_q);
            joint.columns_mut(big_q.ncols(), coupling.ncols()).copy_from(&coupling);
            let solver = MinNormSolver::new(&joint);
            let (sol, _) = solver.solve_vector(&vec(&op.r))?;
            sol.rows(big_q.ncols(), coupling.ncols()).into_owned()
        }
    };
    let residual = (&c * &k_vec - &target).norm() / scale;
    if !(residual <= tol) {
        return Err(Error::InfeasibleOrder {
            degree: op.degree(),
            residual,
        });
    }
    let k = unvec(k_vec.as_slice(), n, n + m)?;
    let system = LtiSystem::discrete(k.columns(0, n).into_owned(), k.columns(n, m).into_owned())?;
    if !check_interpolator_with(op, &system, tol.max(DEFAULT_RESIDUAL_TOL))? {
        return Err(Error::InfeasibleOrder {
            degree: op.degree(),
            residual,
        });
    }
    Ok(DiscreteDesign {
        system,
        relative_residual: residual,
    })
}

/// Interpolator test with the default tolerance.
pub fn check_interpolator(op: &InterpolationOperator, sys_d: &LtiSystem) -> Result<bool> {
    check_interpolator_with(op, sys_d, DEFAULT_RESIDUAL_TOL)
}

/// True iff every column of `R + T1 [A_d B_d] T2` lies in the range of `Q`.
pub fn check_interpolator_with(op: &InterpolationOperator, sys_d: &LtiSystem, tol: f64) -> Result<bool> {
    let rhs = op.right_hand_side(sys_d)?;
    Ok(image_contained_with(&rhs, &op.q_solver, tol))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SegmentSolution {
    pub k: usize,
    /// `m x N`
    pub u: Matrix,
    /// `n x N`
    pub x: Matrix,
    pub residual: f64,
}

/// Minimum-norm `(X, U)` for segment `k`.
pub fn solve_segment(
    op: &InterpolationOperator,
    sys_d: &LtiSystem,
    k: usize,
    x_k: &Vector,
    u_k: &Vector,
    u_k1: &Vector,
) -> Result<SegmentSolution> {
    let (n, m) = (op.n, op.m);
    if x_k.len() != n {
        return Err(dim_err("segment start state", n, x_k.len()));
    }
    if u_k.len() != m || u_k1.len() != m {
        return Err(dim_err("segment inputs", m, u_k.len().max(u_k1.len())));
    }
    let mut z = Vector::zeros(n + 2 * m);
    z.rows_mut(0, n).copy_from(x_k);
    z.rows_mut(n, m).copy_from(u_k);
    z.rows_mut(n + m, m).copy_from(u_k1);
    let rhs = op.right_hand_side(sys_d)? * z;
    let (sol, residual) = op.q_solver.solve_vector(&rhs)?;
    if residual > DEFAULT_RESIDUAL_TOL * rhs.norm().max(1.0) {
        return Err(Error::SegmentResidual { residual });
    }
    let nn = op.degree();
    Ok(SegmentSolution {
        k,
        x: unvec(&sol.as_slice()[..n * nn], n, nn)?,
        u: unvec(&sol.as_slice()[n * nn..], m, nn)?,
        residual,
    })
}

/// Lifted trajectory of one discrete run.
#[derive(Debug, Clone)]
pub struct AssembledTrajectory {
    pub x_d: Vec<Vector>,
    pub segments: Vec<SegmentSolution>,
    pub u_c: PiecewisePolynomial,
    pub x_c: PiecewisePolynomial,
}

/// Rolls `x_d` forward under `u_d` and lifts every step to its segment
/// polynomials. `u_d` holds `ell + 1` samples.
pub fn assemble_trajectory(
    op: &InterpolationOperator,
    sys_d: &LtiSystem,
    x0: &Vector,
    u_d: &[Vector],
) -> Result<AssembledTrajectory> {
    if u_d.len() < 2 {
        return Err(dim_err("input sequence length", ">= 2", u_d.len()));
    }
    let ell = u_d.len() - 1;
    let mut x_d = Vec::with_capacity(ell + 1);
    x_d.push(x0.clone());
    for k in 0..ell {
        let next = sys_d.step(&x_d[k], &u_d[k])?;
        x_d.push(next);
    }
    let mut segments = Vec::with_capacity(ell);
    for k in 0..ell {
        segments.push(solve_segment(op, sys_d, k, &x_d[k], &u_d[k], &u_d[k + 1])?);
    }
    let (u_c, x_c) = lift(op, &x_d, u_d, &segments)?;
    Ok(AssembledTrajectory {
        x_d,
        segments,
        u_c,
        x_c,
    })
}

/// Piecewise polynomials `(u_c, x_c)` from samples and segment solutions.
pub fn lift(
    op: &InterpolationOperator,
    x_d: &[Vector],
    u_d: &[Vector],
    segments: &[SegmentSolution],
) -> Result<(PiecewisePolynomial, PiecewisePolynomial)> {
    let u_segments = segments
        .iter()
        .map(|s| SegmentPolynomial {
            value_at_0: u_d[s.k].clone(),
            coeffs: s.u.clone(),
        })
        .collect();
    let x_segments = segments
        .iter()
        .map(|s| SegmentPolynomial {
            value_at_0: x_d[s.k].clone(),
            coeffs: s.x.clone(),
        })
        .collect();
    Ok((
        PiecewisePolynomial::new(op.basis.clone(), u_segments)?,
        PiecewisePolynomial::new(op.basis.clone(), x_segments)?,
    ))
}
