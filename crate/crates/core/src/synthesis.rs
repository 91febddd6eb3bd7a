//! Controller synthesis: one linear program over the discrete trajectory
//! with Bernstein control-point constraints, then reconstruction of the
//! continuous-time input.

use crate::contracts::{
    discretize_contract, select_sampling_with, smoothness_analysis, DiscreteContract, HPolytope,
    PiecewiseContract, SmoothnessReport,
};
use crate::error::{dim_err, Error, Result};
use crate::interpolation::{
    build_operator, check_interpolator, design_discrete_with, solve_segment, DesignSelection,
    InterpolationOperator, SegmentSolution, DEFAULT_RESIDUAL_TOL,
};
use crate::linalg::{Matrix, Vector};
use crate::lp::{solve_lp, ConstraintRef, LinearProgram, LpBuilder, LpStatus};
use crate::system::LtiSystem;
use crate::trajectory::{PiecewisePolynomial, SegmentPolynomial};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ObjectiveMode {
    /// Minimize `sum_k |u_d(k)|_1`.
    #[default]
    MinL1Input,
    FeasibilityOnly,
}

#[derive(Debug, Clone)]
pub struct SynthesisProblem {
    pub system: LtiSystem,
    pub contract: PiecewiseContract,
    pub x0: Vector,
    pub ell_d: usize,
    pub degree: usize,
    pub objective: ObjectiveMode,
    pub design: DesignSelection,
    pub residual_tol: f64,
}

impl SynthesisProblem {
    pub fn new(system: LtiSystem, contract: PiecewiseContract, x0: Vector, ell_d: usize, degree: usize) -> Self {
        Self {
            system,
            contract,
            x0,
            ell_d,
            degree,
            objective: ObjectiveMode::default(),
            design: DesignSelection::default(),
            residual_tol: DEFAULT_RESIDUAL_TOL,
        }
    }

    fn validate(&self) -> Result<()> {
        let n = self.system.state_dim();
        let m = self.system.input_dim();
        if self.contract.state_dim() != n {
            return Err(dim_err("contract state dimension", n, self.contract.state_dim()));
        }
        if self.contract.input_dim() != m {
            return Err(dim_err("contract input dimension", m, self.contract.input_dim()));
        }
        if self.x0.len() != n {
            return Err(dim_err("initial state", n, self.x0.len()));
        }
        if self.x0.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("initial state"));
        }
        Ok(())
    }
}

/// Position of every decision variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VariableLayout {
    pub n: usize,
    pub m: usize,
    pub ell: usize,
    pub with_slacks: bool,
}

impl VariableLayout {
    pub fn input(&self, k: usize, i: usize) -> usize {
        k * self.m + i
    }

    /// State variables exist for `k >= 1`; `x_d(0)` is fixed.
    pub fn state(&self, k: usize, i: usize) -> usize {
        debug_assert!(k >= 1);
        (self.ell + 1) * self.m + (k - 1) * self.n + i
    }

    pub fn slack(&self, k: usize, i: usize) -> usize {
        (self.ell + 1) * self.m + self.ell * self.n + k * self.m + i
    }

    pub fn num_vars(&self) -> usize {
        let base = (self.ell + 1) * self.m + self.ell * self.n;
        if self.with_slacks {
            base + (self.ell + 1) * self.m
        } else {
            base
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Slot {
    Var(usize),
    Const(f64),
}

/// The synthesis program plus the bookkeeping needed to read it back.
#[derive(Debug, Clone)]
pub struct Encoding {
    pub program: LinearProgram,
    pub layout: VariableLayout,
    /// Label of each inequality row.
    pub inequality_groups: Vec<String>,
    /// Label of each equality row.
    pub equality_groups: Vec<String>,
    /// Per Bernstein column `j`: maps `[x_k; u_k; u_{k+1}]` to column `j` of
    /// the input control points `V^k`.
    pub input_point_maps: Vec<Matrix>,
    /// Same for the state control points `W^k`.
    pub state_point_maps: Vec<Matrix>,
}

impl Encoding {
    pub fn group_of(&self, c: ConstraintRef) -> &str {
        match c {
            ConstraintRef::Inequality(i) => &self.inequality_groups[i],
            ConstraintRef::Equality(i) => &self.equality_groups[i],
        }
    }
}

/// Column maps `[x_k; u_k; u_{k+1}] -> V^k_j` and `-> W^k_j`, obtained by
/// composing the cached segment solve with the Bernstein conversion.
pub fn control_point_maps(op: &InterpolationOperator, sys_d: &LtiSystem) -> Result<(Vec<Matrix>, Vec<Matrix>)> {
    let n = op.state_dim();
    let m = op.input_dim();
    let nn = op.degree();
    let w = n + 2 * m;
    let s = op.segment_map(sys_d)?;
    let minv = op.bernstein().conversion_inverse();
    let mut e0x = Matrix::zeros(n, w);
    e0x.view_mut((0, 0), (n, n)).fill_with_identity();
    let mut e0u = Matrix::zeros(m, w);
    e0u.view_mut((0, n), (m, m)).fill_with_identity();
    let mut v_maps = Vec::with_capacity(nn + 1);
    let mut w_maps = Vec::with_capacity(nn + 1);
    for j in 0..=nn {
        let mut mw = &e0x * minv[(0, j)];
        let mut mv = &e0u * minv[(0, j)];
        for i in 1..=nn {
            let c = minv[(i, j)];
            mw += s.rows((i - 1) * n, n) * c;
            mv += s.rows(n * nn + (i - 1) * m, m) * c;
        }
        v_maps.push(mv);
        w_maps.push(mw);
    }
    Ok((v_maps, w_maps))
}

struct RowSink {
    builder: LpBuilder,
    ineq_groups: Vec<String>,
    eq_groups: Vec<String>,
}

impl RowSink {
    /// Adds `H (M z) <= h` where `z` is given slot by slot.
    fn add_membership(
        &mut self,
        set: &HPolytope,
        map: &Matrix,
        z: &[Slot],
        label: &str,
    ) -> Result<()> {
        let hm = set.h_matrix() * map;
        let nv = self.builder_vars();
        for r in 0..hm.nrows() {
            let mut row = vec![0.0; nv];
            let mut rhs = set.h_vector()[r];
            for (i, slot) in z.iter().enumerate() {
                let a = hm[(r, i)];
                match *slot {
                    Slot::Var(v) => row[v] += a,
                    Slot::Const(c) => rhs -= a * c,
                }
            }
            if row.iter().all(|&a| a == 0.0) {
                // Only x_d(0) enters; checked before encoding.
                if rhs < -1e-9 {
                    return Err(Error::InitialStateOutside { violation: -rhs });
                }
                continue;
            }
            self.builder.add_le(&row, rhs);
            self.ineq_groups.push(label.to_string());
        }
        Ok(())
    }

    fn builder_vars(&self) -> usize {
        self.builder.num_vars()
    }
}

/// Encodes the synthesis program for a designed discrete system.
///
/// Variables are `u_d(0..=ell)`, `x_d(1..=ell)` and, for the L1 objective,
/// one slack per input entry. Constraints: discrete dynamics, membership of
/// `u_d(k)` and `x_d(k)` for `k = 0..=ell`, and membership of every Bernstein
/// control point of segments `k = 0..ell-1`.
pub fn encode(
    problem: &SynthesisProblem,
    op: &InterpolationOperator,
    sys_d: &LtiSystem,
    dc: &DiscreteContract,
) -> Result<Encoding> {
    problem.validate()?;
    let n = op.state_dim();
    let m = op.input_dim();
    let ell = dc.ell;
    if problem.ell_d != ell {
        return Err(dim_err("discrete contract length", problem.ell_d, ell));
    }
    let layout = VariableLayout {
        n,
        m,
        ell,
        with_slacks: problem.objective == ObjectiveMode::MinL1Input,
    };
    let nv = layout.num_vars();
    let (v_maps, w_maps) = control_point_maps(op, sys_d)?;
    let mut sink = RowSink {
        builder: LpBuilder::new(nv),
        ineq_groups: Vec::new(),
        eq_groups: Vec::new(),
    };

    let state_slots = |k: usize| -> Vec<Slot> {
        (0..n)
            .map(|i| {
                if k == 0 {
                    Slot::Const(problem.x0[i])
                } else {
                    Slot::Var(layout.state(k, i))
                }
            })
            .collect()
    };
    let input_slots = |k: usize| -> Vec<Slot> { (0..m).map(|i| Slot::Var(layout.input(k, i))).collect() };

    // Dynamics x(k+1) - A_d x(k) - B_d u(k) = 0.
    for k in 0..ell {
        for r in 0..n {
            let mut row = vec![0.0; nv];
            let mut rhs = 0.0;
            row[layout.state(k + 1, r)] = 1.0;
            for (c, slot) in state_slots(k).into_iter().enumerate() {
                let a = sys_d.a()[(r, c)];
                match slot {
                    Slot::Var(v) => row[v] -= a,
                    Slot::Const(x) => rhs += a * x,
                }
            }
            for c in 0..m {
                row[layout.input(k, c)] -= sys_d.b()[(r, c)];
            }
            sink.builder.add_eq(&row, rhs);
            sink.eq_groups.push(format!("dynamics k={k}"));
        }
    }

    let eye_n = Matrix::identity(n, n);
    let eye_m = Matrix::identity(m, m);
    for k in 0..=ell {
        sink.add_membership(dc.input_set(k), &eye_m, &input_slots(k), &format!("input membership k={k}"))?;
        sink.add_membership(dc.state_set(k), &eye_n, &state_slots(k), &format!("state membership k={k}"))?;
    }

    for k in 0..ell {
        let mut z = state_slots(k);
        z.extend(input_slots(k));
        z.extend(input_slots(k + 1));
        let u_label = format!("input control points k={k}");
        let x_label = format!("state control points k={k}");
        for j in 0..v_maps.len() {
            sink.add_membership(dc.input_set(k), &v_maps[j], &z, &u_label)?;
            sink.add_membership(dc.state_set(k), &w_maps[j], &z, &x_label)?;
        }
    }

    if layout.with_slacks {
        for k in 0..=ell {
            for i in 0..m {
                let mut row = vec![0.0; nv];
                row[layout.input(k, i)] = 1.0;
                row[layout.slack(k, i)] = -1.0;
                sink.builder.add_le(&row, 0.0);
                row[layout.input(k, i)] = -1.0;
                sink.builder.add_le(&row, 0.0);
                sink.ineq_groups.push("l1 slack".into());
                sink.ineq_groups.push("l1 slack".into());
                sink.builder.set_objective(layout.slack(k, i), 1.0);
            }
        }
    }

    Ok(Encoding {
        program: sink.builder.build()?,
        layout,
        inequality_groups: sink.ineq_groups,
        equality_groups: sink.eq_groups,
        input_point_maps: v_maps,
        state_point_maps: w_maps,
    })
}

#[derive(Debug, Clone)]
pub struct SynthesisResult {
    pub smoothness: SmoothnessReport,
    pub tau: f64,
    pub discrete_contract: DiscreteContract,
    pub discrete_system: LtiSystem,
    pub design_residual: f64,
    pub u_d: Vec<Vector>,
    pub x_d: Vec<Vector>,
    pub segments: Vec<SegmentSolution>,
    /// `V^k`, `m x (N+1)`.
    pub control_points_u: Vec<Matrix>,
    /// `W^k`, `n x (N+1)`.
    pub control_points_x: Vec<Matrix>,
    pub u_c: PiecewisePolynomial,
    pub x_c: PiecewisePolynomial,
    pub objective_value: f64,
    pub lp_iterations: usize,
    pub lp_max_violation: f64,
    /// Largest `H z - h` over all control points and samples.
    pub control_point_violation: f64,
    /// Largest gap between the LP's control points and those recomputed
    /// from the segment solves.
    pub encoding_drift: f64,
}

/// Runs the full pipeline on `problem`.
pub fn synthesize(problem: &SynthesisProblem) -> Result<SynthesisResult> {
    problem.validate()?;
    let smoothness = smoothness_analysis(&problem.contract)?;
    let tau = select_sampling_with(&smoothness, problem.contract.horizon(), problem.ell_d)?;
    let dc = discretize_contract(&problem.contract, tau, problem.ell_d)?;
    let x0_violation = dc.state_set(0).violation(&problem.x0);
    if x0_violation > 1e-9 {
        return Err(Error::InitialStateOutside { violation: x0_violation });
    }
    let op = build_operator(&problem.system, problem.degree, tau)?;
    let design = design_discrete_with(&op, problem.design, problem.residual_tol)?;
    let sys_d = design.system;
    debug_assert!(check_interpolator(&op, &sys_d).unwrap_or(false));

    let enc = encode(problem, &op, &sys_d, &dc)?;
    let lp = solve_lp(&enc.program);
    let z = match lp.status {
        LpStatus::Optimal => lp.z_star.clone().expect("optimal carries a point"),
        LpStatus::Unbounded => return Err(Error::Unbounded),
        LpStatus::Infeasible => {
            let mut violated: Vec<String> = Vec::new();
            for c in &lp.infeasible_rows {
                let g = enc.group_of(*c).to_string();
                if !violated.contains(&g) {
                    violated.push(g);
                }
            }
            return Err(Error::DiscreteInfeasible {
                certificate: lp.infeasibility,
                violated,
            });
        }
    };
    let layout = enc.layout;
    let (n, m, ell) = (layout.n, layout.m, layout.ell);
    let u_d: Vec<Vector> = (0..=ell)
        .map(|k| Vector::from_fn(m, |i, _| z[layout.input(k, i)]))
        .collect();
    let mut x_d = Vec::with_capacity(ell + 1);
    x_d.push(problem.x0.clone());
    for k in 0..ell {
        let next = sys_d.step(&x_d[k], &u_d[k])?;
        x_d.push(next);
    }

    let mut segments = Vec::with_capacity(ell);
    let mut control_points_u = Vec::with_capacity(ell);
    let mut control_points_x = Vec::with_capacity(ell);
    let mut violation = 0.0_f64;
    let mut drift = 0.0_f64;
    for k in 0..ell {
        let seg = solve_segment(&op, &sys_d, k, &x_d[k], &u_d[k], &u_d[k + 1])?;
        let v = op.bernstein().control_points(&u_d[k], &seg.u)?;
        let w = op.bernstein().control_points(&x_d[k], &seg.x)?;
        let mut zk = Vector::zeros(n + 2 * m);
        zk.rows_mut(0, n).copy_from(&x_d[k]);
        zk.rows_mut(n, m).copy_from(&u_d[k]);
        zk.rows_mut(n + m, m).copy_from(&u_d[k + 1]);
        for j in 0..v.ncols() {
            let vj = v.column(j).into_owned();
            let wj = w.column(j).into_owned();
            drift = drift
                .max((&enc.input_point_maps[j] * &zk - &vj).amax())
                .max((&enc.state_point_maps[j] * &zk - &wj).amax());
            violation = violation
                .max(dc.input_set(k).violation(&vj))
                .max(dc.state_set(k).violation(&wj));
        }
        segments.push(seg);
        control_points_u.push(v);
        control_points_x.push(w);
    }
    for k in 0..=ell {
        violation = violation
            .max(dc.input_set(k).violation(&u_d[k]))
            .max(dc.state_set(k).violation(&x_d[k]));
    }

    let basis = op.basis().clone();
    let u_c = PiecewisePolynomial::new(
        basis.clone(),
        segments
            .iter()
            .map(|s| SegmentPolynomial {
                value_at_0: u_d[s.k].clone(),
                coeffs: s.u.clone(),
            })
            .collect(),
    )?;
    let x_c = PiecewisePolynomial::new(
        basis,
        segments
            .iter()
            .map(|s| SegmentPolynomial {
                value_at_0: x_d[s.k].clone(),
                coeffs: s.x.clone(),
            })
            .collect(),
    )?;

    Ok(SynthesisResult {
        smoothness,
        tau,
        discrete_contract: dc,
        discrete_system: sys_d,
        design_residual: design.relative_residual,
        u_d,
        x_d,
        segments,
        control_points_u,
        control_points_x,
        u_c,
        x_c,
        objective_value: lp.objective_value,
        lp_iterations: lp.iterations,
        lp_max_violation: lp.max_violation,
        control_point_violation: violation,
        encoding_drift: drift,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{robot_problem, robot_system};
    use nalgebra::dmatrix;

    #[test]
    fn robot_variable_count() {
        let p = robot_problem(5.0);
        let smooth = smoothness_analysis(&p.contract).unwrap();
        let tau = select_sampling_with(&smooth, 5.0, 5).unwrap();
        let dc = discretize_contract(&p.contract, tau, 5).unwrap();
        let op = build_operator(&p.system, 5, tau).unwrap();
        let sys_d = crate::interpolation::design_discrete(&op).unwrap();
        let enc = encode(&p, &op, &sys_d, &dc).unwrap();
        assert_eq!(enc.program.num_vars(), 44);
        assert_eq!(enc.program.eq_matrix.nrows(), 20);

        let mut feas = p.clone();
        feas.objective = ObjectiveMode::FeasibilityOnly;
        let enc = encode(&feas, &op, &sys_d, &dc).unwrap();
        assert_eq!(enc.program.num_vars(), 32);
        assert_eq!(enc.program.objective.amax(), 0.0);
    }

    #[test]
    fn first_control_point_is_the_sample() {
        let p = robot_problem(5.0);
        let op = build_operator(&p.system, 5, 1.0).unwrap();
        let sys_d = crate::interpolation::design_discrete(&op).unwrap();
        let (v_maps, w_maps) = control_point_maps(&op, &sys_d).unwrap();
        let mut e_u = Matrix::zeros(2, 8);
        e_u.view_mut((0, 4), (2, 2)).fill_with_identity();
        let mut e_u1 = Matrix::zeros(2, 8);
        e_u1.view_mut((0, 6), (2, 2)).fill_with_identity();
        let mut e_x = Matrix::zeros(4, 8);
        e_x.view_mut((0, 0), (4, 4)).fill_with_identity();
        assert!((&v_maps[0] - e_u).amax() < 1e-12);
        assert!((&w_maps[0] - e_x).amax() < 1e-12);
        assert!((&v_maps[5] - e_u1).amax() < 1e-8);
    }

    #[test]
    fn robot_demo_is_feasible() {
        let r = synthesize(&robot_problem(5.0)).unwrap();
        assert_eq!(r.tau, 1.0);
        assert_eq!(r.smoothness.min_ell, 2);
        assert!(r.control_point_violation <= 1e-8);
        assert!(r.encoding_drift <= 1e-8);
        for k in 0..=5 {
            assert!((r.u_c.eval(k as f64).unwrap() - &r.u_d[k]).amax() < 1e-9);
        }
        for k in 0..5 {
            assert_eq!(r.control_points_u[k].column(0).into_owned(), r.u_d[k]);
            assert!((r.control_points_u[k].column(5) - &r.u_d[k + 1]).amax() < 1e-9);
        }
    }

    #[test]
    fn tightened_inputs_are_infeasible() {
        match synthesize(&robot_problem(0.05)) {
            Err(Error::DiscreteInfeasible { certificate, violated }) => {
                assert!(certificate > 0.0);
                assert!(!violated.is_empty());
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn stable_system_at_rest_needs_no_input() {
        let sys = LtiSystem::continuous(dmatrix![-1.0, 0.5; 0.0, -2.0], dmatrix![0.0; 1.0]).unwrap();
        let contract = PiecewiseContract::constant(
            3.0,
            HPolytope::from_box(&[-1.0], &[1.0]).unwrap(),
            HPolytope::from_box(&[-1e6, -1e6], &[1e6, 1e6]).unwrap(),
        )
        .unwrap();
        let p = SynthesisProblem::new(sys, contract, Vector::zeros(2), 3, 5);
        let r = synthesize(&p).unwrap();
        assert!(r.objective_value.abs() < 1e-12);
        assert!(r.u_d.iter().all(|u| u.amax() < 1e-12));
    }

    #[test]
    fn initial_state_outside_is_reported() {
        let mut p = robot_problem(5.0);
        p.x0[0] = 3.0;
        assert!(matches!(synthesize(&p), Err(Error::InitialStateOutside { .. })));
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let mut p = robot_problem(5.0);
        p.system = LtiSystem::continuous(Matrix::zeros(2, 2), Matrix::identity(2, 2)).unwrap();
        assert!(matches!(synthesize(&p), Err(Error::Dimension { .. })));
        let _ = robot_system();
    }
}
