//! Dense two-phase tableau simplex.
//!
//! Solves `min c^T z` subject to `G z <= g` and `E z = e` with `z` free.
//! Free variables are split as `z = p - q`, every inequality gets a slack,
//! and rows that cannot start with a slack in the basis get an artificial
//! variable. Pivoting follows Bland's rule, so the result is deterministic
//! and cycling cannot occur. The final basic solution is recomputed from the
//! original data with an LU solve to remove accumulated tableau round-off.

use crate::contracts::HPolytope;
use crate::error::{dim_err, Result};
use crate::linalg::{Matrix, Vector};

/// Absolute tolerance on constraint violation.
pub const FEASIBILITY_TOL: f64 = 1e-9;

const PIVOT_TOL: f64 = 1e-11;
const COST_TOL: f64 = 1e-11;
// Pivots between reinversions of the basis from the original data.
const REFRESH_INTERVAL: usize = 40;
const DRIFT_TOL: f64 = 1e-11;
// Reduced costs this small on a rayless column are treated as zero.
const STALL_LIMIT: usize = 50;
const NOISE_COST: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub objective: Vector,
    pub ineq_matrix: Matrix,
    pub ineq_rhs: Vector,
    pub eq_matrix: Matrix,
    pub eq_rhs: Vector,
}

impl LinearProgram {
    pub fn new(
        objective: Vector,
        ineq_matrix: Matrix,
        ineq_rhs: Vector,
        eq_matrix: Matrix,
        eq_rhs: Vector,
    ) -> Result<Self> {
        let n = objective.len();
        if ineq_matrix.ncols() != n {
            return Err(dim_err("LP inequality columns", n, ineq_matrix.ncols()));
        }
        if eq_matrix.ncols() != n {
            return Err(dim_err("LP equality columns", n, eq_matrix.ncols()));
        }
        if ineq_matrix.nrows() != ineq_rhs.len() {
            return Err(dim_err("LP inequality rhs", ineq_matrix.nrows(), ineq_rhs.len()));
        }
        if eq_matrix.nrows() != eq_rhs.len() {
            return Err(dim_err("LP equality rhs", eq_matrix.nrows(), eq_rhs.len()));
        }
        let all = objective
            .iter()
            .chain(ineq_matrix.iter())
            .chain(ineq_rhs.iter())
            .chain(eq_matrix.iter())
            .chain(eq_rhs.iter());
        if all.clone().any(|x| !x.is_finite()) {
            return Err(crate::error::Error::NonFinite("linear program data"));
        }
        Ok(Self {
            objective,
            ineq_matrix,
            ineq_rhs,
            eq_matrix,
            eq_rhs,
        })
    }

    /// Feasibility problem `G z <= g` with zero objective.
    pub fn feasibility(ineq_matrix: Matrix, ineq_rhs: Vector) -> Result<Self> {
        let n = ineq_matrix.ncols();
        Self::new(
            Vector::zeros(n),
            ineq_matrix,
            ineq_rhs,
            Matrix::zeros(0, n),
            Vector::zeros(0),
        )
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    /// Largest violation of any constraint at `z`.
    pub fn max_violation(&self, z: &Vector) -> f64 {
        let ineq = (&self.ineq_matrix * z - &self.ineq_rhs)
            .iter()
            .fold(0.0_f64, |m, &v| m.max(v));
        let eq = (&self.eq_matrix * z - &self.eq_rhs)
            .iter()
            .fold(0.0_f64, |m, &v| m.max(v.abs()));
        ineq.max(eq)
    }
}

/// Incremental row-wise construction of a [`LinearProgram`].
#[derive(Debug, Clone)]
pub struct LpBuilder {
    num_vars: usize,
    objective: Vec<f64>,
    ineq: Vec<f64>,
    ineq_rhs: Vec<f64>,
    eq: Vec<f64>,
    eq_rhs: Vec<f64>,
}

impl LpBuilder {
    pub fn new(num_vars: usize) -> Self {
        Self {
            num_vars,
            objective: vec![0.0; num_vars],
            ineq: Vec::new(),
            ineq_rhs: Vec::new(),
            eq: Vec::new(),
            eq_rhs: Vec::new(),
        }
    }

    pub fn set_objective(&mut self, var: usize, coeff: f64) {
        self.objective[var] = coeff;
    }

    /// Adds `row . z <= rhs`; returns the row index.
    pub fn add_le(&mut self, row: &[f64], rhs: f64) -> usize {
        assert_eq!(row.len(), self.num_vars);
        self.ineq.extend_from_slice(row);
        self.ineq_rhs.push(rhs);
        self.ineq_rhs.len() - 1
    }

    /// Adds `row . z = rhs`; returns the row index.
    pub fn add_eq(&mut self, row: &[f64], rhs: f64) -> usize {
        assert_eq!(row.len(), self.num_vars);
        self.eq.extend_from_slice(row);
        self.eq_rhs.push(rhs);
        self.eq_rhs.len() - 1
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_ineq(&self) -> usize {
        self.ineq_rhs.len()
    }

    pub fn num_eq(&self) -> usize {
        self.eq_rhs.len()
    }

    pub fn build(self) -> Result<LinearProgram> {
        let n = self.num_vars;
        let gi = self.ineq_rhs.len();
        let ei = self.eq_rhs.len();
        LinearProgram::new(
            Vector::from_vec(self.objective),
            Matrix::from_row_slice(gi, n, &self.ineq),
            Vector::from_vec(self.ineq_rhs),
            Matrix::from_row_slice(ei, n, &self.eq),
            Vector::from_vec(self.eq_rhs),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Reference to one constraint of a [`LinearProgram`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintRef {
    Inequality(usize),
    Equality(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpResult {
    pub status: LpStatus,
    /// Optimal point; `None` unless `status == Optimal`.
    pub z_star: Option<Vector>,
    pub objective_value: f64,
    /// Maximum constraint violation of `z_star` (0 when there is none).
    pub max_violation: f64,
    /// Phase-1 optimum: total artificial mass left. Positive iff infeasible.
    pub infeasibility: f64,
    /// Constraints carrying artificial mass at the phase-1 optimum.
    pub infeasible_rows: Vec<ConstraintRef>,
    pub iterations: usize,
}

/// Pluggable LP backend.
pub trait LpSolver {
    fn solve(&self, program: &LinearProgram) -> LpResult;
}

/// Reference dense tableau simplex with Bland's rule.
#[derive(Debug, Clone)]
pub struct DenseSimplex {
    pub max_iterations: usize,
}

impl Default for DenseSimplex {
    fn default() -> Self {
        Self {
            max_iterations: 200_000,
        }
    }
}

struct Tableau {
    rows: usize,
    cols: usize, // structural columns, excluding rhs
    data: Vec<f64>,
    /// Standard-form `[A | b]` the tableau started from.
    original: Matrix,
    basis: Vec<usize>,
}

impl Tableau {
    #[inline]
    fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * (self.cols + 1) + c]
    }

    #[inline]
    fn rhs(&self, r: usize) -> f64 {
        self.data[r * (self.cols + 1) + self.cols]
    }

    /// `|B x_B - b|_inf / (1 + |b|_inf)` for the current basic solution.
    fn drift(&self) -> f64 {
        let w = self.cols + 1;
        let mut worst = 0.0_f64;
        let mut bnorm = 0.0_f64;
        for i in 0..self.rows {
            let mut acc = -self.original[(i, self.cols)];
            bnorm = bnorm.max(self.original[(i, self.cols)].abs());
            for r in 0..self.rows {
                let a = self.original[(i, self.basis[r])];
                if a != 0.0 {
                    acc += a * self.data[r * w + self.cols];
                }
            }
            worst = worst.max(acc.abs());
        }
        worst / (1.0 + bnorm)
    }

    /// Reinverts only when the basic solution has drifted.
    fn maybe_refresh(&mut self, objective: &[f64], cost: &mut [f64]) {
        if self.drift() > DRIFT_TOL {
            self.refresh(objective, cost);
        }
    }

    /// Recomputes `B^{-1} [A | b]` and the reduced costs of `objective`
    /// from the original data, discarding accumulated round-off.
    fn refresh(&mut self, objective: &[f64], cost: &mut [f64]) {
        let w = self.cols + 1;
        let b = Matrix::from_fn(self.rows, self.rows, |i, j| self.original[(i, self.basis[j])]);
        let Some(b_inv) = b.lu().try_inverse() else {
            return;
        };
        let fresh = b_inv * &self.original;
        if fresh.iter().any(|x| !x.is_finite()) {
            return;
        }
        for r in 0..self.rows {
            for c in 0..w {
                let v = fresh[(r, c)];
                self.data[r * w + c] = if v.abs() < 1e-14 { 0.0 } else { v };
            }
            self.data[r * w + self.basis[r]] = 1.0;
        }
        for c in 0..w {
            let base = if c < self.cols { objective[c] } else { 0.0 };
            let mut v = base;
            for r in 0..self.rows {
                let cb = objective[self.basis[r]];
                if cb != 0.0 {
                    v -= cb * self.data[r * w + c];
                }
            }
            cost[c] = v;
        }
        for r in 0..self.rows {
            cost[self.basis[r]] = 0.0;
        }
    }

    fn pivot(&mut self, pr: usize, pc: usize, cost: &mut [f64]) {
        let w = self.cols + 1;
        let p = self.data[pr * w + pc];
        let inv = 1.0 / p;
        for v in &mut self.data[pr * w..(pr + 1) * w] {
            *v *= inv;
        }
        self.data[pr * w + pc] = 1.0;
        let pivot_row: Vec<f64> = self.data[pr * w..(pr + 1) * w].to_vec();
        for r in 0..self.rows {
            if r == pr {
                continue;
            }
            let f = self.data[r * w + pc];
            if f == 0.0 {
                continue;
            }
            let row = &mut self.data[r * w..(r + 1) * w];
            for (x, &pv) in row.iter_mut().zip(pivot_row.iter()) {
                *x -= f * pv;
            }
            row[pc] = 0.0;
        }
        let f = cost[pc];
        if f != 0.0 {
            for (x, &pv) in cost.iter_mut().zip(pivot_row.iter()) {
                *x -= f * pv;
            }
            cost[pc] = 0.0;
        }
        self.basis[pr] = pc;
    }
}

enum PhaseOutcome {
    Optimal,
    Unbounded,
    IterationLimit,
}

impl DenseSimplex {
    /// Runs simplex iterations on `cost` (reduced-cost row, last entry is
    /// minus the objective) over the columns allowed by `allowed`.
    fn run_phase(
        &self,
        tab: &mut Tableau,
        objective: &[f64],
        cost: &mut [f64],
        allowed: &[bool],
        bounded: bool,
        iterations: &mut usize,
    ) -> PhaseOutcome {
        let mut since_refresh = 0;
        // Columns with a round-off reduced cost but no pivot row; skipped
        // until the next pivot changes the basis.
        let mut blocked = vec![false; tab.cols];
        let mut degenerate_run = 0;
        loop {
            if *iterations >= self.max_iterations {
                return PhaseOutcome::IterationLimit;
            }
            if since_refresh >= REFRESH_INTERVAL {
                tab.maybe_refresh(objective, cost);
                since_refresh = 0;
            }
            // Dantzig pricing; Bland's rule while stalled on a degenerate vertex.
            let candidates = (0..tab.cols).filter(|&j| allowed[j] && !blocked[j] && cost[j] < -COST_TOL);
            let entering = if degenerate_run >= STALL_LIMIT {
                candidates.min()
            } else {
                candidates.min_by(|&a, &b| cost[a].total_cmp(&cost[b]).then(a.cmp(&b)))
            };
            let Some(pc) = entering else {
                if since_refresh == 0 {
                    return PhaseOutcome::Optimal;
                }
                // Confirm optimality on fresh data if the tableau drifted.
                tab.maybe_refresh(objective, cost);
                since_refresh = 0;
                if (0..tab.cols).any(|j| allowed[j] && !blocked[j] && cost[j] < -COST_TOL) {
                    continue;
                }
                return PhaseOutcome::Optimal;
            };
            let mut best: Option<(usize, f64)> = None;
            for r in 0..tab.rows {
                let a = tab.at(r, pc);
                if a > PIVOT_TOL {
                    let ratio = tab.rhs(r).max(0.0) / a;
                    best = match best {
                        None => Some((r, ratio)),
                        Some((br, bratio)) => {
                            if ratio < bratio - 1e-14 * bratio.abs().max(1.0)
                                || (ratio <= bratio + 1e-14 * bratio.abs().max(1.0)
                                    && tab.basis[r] < tab.basis[br])
                            {
                                Some((r, ratio))
                            } else {
                                Some((br, bratio))
                            }
                        }
                    };
                }
            }
            let Some((pr, step)) = best else {
                if bounded || cost[pc] > -NOISE_COST {
                    blocked[pc] = true;
                    continue;
                }
                return PhaseOutcome::Unbounded;
            };
            blocked.iter_mut().for_each(|b| *b = false);
            if step * -cost[pc] > COST_TOL {
                degenerate_run = 0;
            } else {
                degenerate_run += 1;
            }
            tab.pivot(pr, pc, cost);
            *iterations += 1;
            since_refresh += 1;
        }
    }
}

fn power_of_two(x: f64) -> f64 {
    if x > 0.0 && x.is_finite() {
        2f64.powi(x.log2().round() as i32)
    } else {
        1.0
    }
}

/// Power-of-two row and column equilibration; returns the scaled program
/// and the column scales (`z = diag(col) z_scaled`).
fn equilibrate(program: &LinearProgram) -> (LinearProgram, Vec<f64>) {
    let n = program.num_vars();
    let row_scale = |m: &Matrix| -> Vec<f64> {
        (0..m.nrows())
            .map(|i| power_of_two(1.0 / m.row(i).amax()))
            .collect()
    };
    let rg = row_scale(&program.ineq_matrix);
    let re = row_scale(&program.eq_matrix);
    let mut g = program.ineq_matrix.clone();
    let mut e = program.eq_matrix.clone();
    for (i, f) in rg.iter().enumerate() {
        g.row_mut(i).scale_mut(*f);
    }
    for (i, f) in re.iter().enumerate() {
        e.row_mut(i).scale_mut(*f);
    }
    let col: Vec<f64> = (0..n)
        .map(|j| {
            let big = g.column(j).amax().max(if e.nrows() > 0 { e.column(j).amax() } else { 0.0 });
            power_of_two(1.0 / big)
        })
        .collect();
    for (j, f) in col.iter().enumerate() {
        g.column_mut(j).scale_mut(*f);
        e.column_mut(j).scale_mut(*f);
    }
    let scaled = LinearProgram {
        objective: Vector::from_fn(n, |j, _| program.objective[j] * col[j]),
        ineq_matrix: g,
        ineq_rhs: Vector::from_fn(rg.len(), |i, _| program.ineq_rhs[i] * rg[i]),
        eq_matrix: e,
        eq_rhs: Vector::from_fn(re.len(), |i, _| program.eq_rhs[i] * re[i]),
    };
    (scaled, col)
}

impl LpSolver for DenseSimplex {
    fn solve(&self, program: &LinearProgram) -> LpResult {
        let (scaled, col) = equilibrate(program);
        let mut result = self.solve_unscaled(&scaled);
        if let Some(z) = result.z_star.as_mut() {
            for (v, f) in z.iter_mut().zip(&col) {
                *v *= f;
            }
            result.objective_value = program.objective.dot(z);
            result.max_violation = program.max_violation(z);
        }
        result
    }
}

impl DenseSimplex {
    fn solve_unscaled(&self, program: &LinearProgram) -> LpResult {
        let n = program.num_vars();
        let gi = program.ineq_rhs.len();
        let ei = program.eq_rhs.len();
        let rows = gi + ei;

        // Column layout: p (n) | q (n) | slacks (gi) | artificials (k).
        let mut art_rows: Vec<usize> = Vec::new();
        let mut sign = vec![1.0; rows];
        for i in 0..gi {
            if program.ineq_rhs[i] < 0.0 {
                sign[i] = -1.0;
                art_rows.push(i);
            }
        }
        for i in 0..ei {
            if program.eq_rhs[i] < 0.0 {
                sign[gi + i] = -1.0;
            }
            art_rows.push(gi + i);
        }
        let n_struct = 2 * n + gi;
        let cols = n_struct + art_rows.len();
        let w = cols + 1;
        let mut data = vec![0.0; rows * w];
        for i in 0..rows {
            let s = sign[i];
            let (coeffs, rhs) = if i < gi {
                (program.ineq_matrix.row(i), program.ineq_rhs[i])
            } else {
                (program.eq_matrix.row(i - gi), program.eq_rhs[i - gi])
            };
            for j in 0..n {
                let a = coeffs[j] * s;
                data[i * w + j] = a;
                data[i * w + n + j] = -a;
            }
            if i < gi {
                data[i * w + 2 * n + i] = s;
            }
            data[i * w + cols] = rhs * s;
        }
        let mut basis = vec![usize::MAX; rows];
        for (k, &r) in art_rows.iter().enumerate() {
            data[r * w + n_struct + k] = 1.0;
            basis[r] = n_struct + k;
        }
        for (i, b) in basis.iter_mut().enumerate().take(gi) {
            if *b == usize::MAX {
                *b = 2 * n + i;
            }
        }
        let original = Matrix::from_fn(rows, w, |i, j| data[i * w + j]);
        let mut tab = Tableau {
            rows,
            cols,
            data,
            original,
            basis,
        };
        let mut iterations = 0;

        // Phase 1: minimize the sum of artificials.
        let mut infeasibility = 0.0;
        let mut infeasible_rows = Vec::new();
        if !art_rows.is_empty() {
            let mut cost = vec![0.0; w];
            for j in n_struct..cols {
                cost[j] = 1.0;
            }
            for &r in &art_rows {
                for j in 0..w {
                    cost[j] -= tab.data[r * w + j];
                }
            }
            let mut phase1 = vec![0.0; cols];
            for c in phase1.iter_mut().skip(n_struct) {
                *c = 1.0;
            }
            let allowed = vec![true; cols];
            match self.run_phase(&mut tab, &phase1, &mut cost, &allowed, true, &mut iterations) {
                PhaseOutcome::Optimal => {}
                // Phase 1 is bounded below by zero; treat anything else as failure.
                PhaseOutcome::Unbounded | PhaseOutcome::IterationLimit => {
                    return infeasible_result(f64::INFINITY, Vec::new(), iterations);
                }
            }
            infeasibility = -cost[cols];
            let scale = 1.0
                + art_rows
                    .iter()
                    .map(|&r| {
                        if r < gi {
                            program.ineq_rhs[r].abs()
                        } else {
                            program.eq_rhs[r - gi].abs()
                        }
                    })
                    .fold(0.0, f64::max);
            if infeasibility > FEASIBILITY_TOL * scale {
                for r in 0..rows {
                    if tab.basis[r] >= n_struct && tab.rhs(r) > FEASIBILITY_TOL {
                        infeasible_rows.push(if r < gi {
                            ConstraintRef::Inequality(r)
                        } else {
                            ConstraintRef::Equality(r - gi)
                        });
                    }
                }
                return infeasible_result(infeasibility, infeasible_rows, iterations);
            }
            // Drive remaining artificials out of the basis.
            let mut dummy = vec![0.0; w];
            for r in 0..rows {
                if tab.basis[r] >= n_struct {
                    if let Some(pc) = (0..n_struct).find(|&j| tab.at(r, j).abs() > 1e-9) {
                        tab.pivot(r, pc, &mut dummy);
                        iterations += 1;
                    }
                }
            }
        }

        // Phase 2.
        let mut phase2 = vec![0.0; cols];
        for j in 0..n {
            phase2[j] = program.objective[j];
            phase2[n + j] = -program.objective[j];
        }
        let mut cost = vec![0.0; w];
        cost[..cols].copy_from_slice(&phase2);
        for r in 0..rows {
            let b = tab.basis[r];
            let cb = cost[b];
            if cb != 0.0 {
                for j in 0..w {
                    cost[j] -= cb * tab.data[r * w + j];
                }
            }
        }
        let mut allowed = vec![true; cols];
        for a in allowed.iter_mut().skip(n_struct) {
            *a = false;
        }
        match self.run_phase(&mut tab, &phase2, &mut cost, &allowed, false, &mut iterations) {
            PhaseOutcome::Optimal => {}
            PhaseOutcome::Unbounded => {
                return LpResult {
                    status: LpStatus::Unbounded,
                    z_star: None,
                    objective_value: f64::NEG_INFINITY,
                    max_violation: 0.0,
                    infeasibility,
                    infeasible_rows,
                    iterations,
                };
            }
            PhaseOutcome::IterationLimit => {
                return infeasible_result(f64::INFINITY, Vec::new(), iterations);
            }
        }

        let z = refine_basic_solution(program, &tab, &sign, n, gi)
            .unwrap_or_else(|| tableau_solution(&tab, n));
        let objective_value = program.objective.dot(&z);
        let max_violation = program.max_violation(&z);
        LpResult {
            status: LpStatus::Optimal,
            z_star: Some(z),
            objective_value,
            max_violation,
            infeasibility,
            infeasible_rows,
            iterations,
        }
    }
}

fn infeasible_result(certificate: f64, rows: Vec<ConstraintRef>, iterations: usize) -> LpResult {
    LpResult {
        status: LpStatus::Infeasible,
        z_star: None,
        objective_value: f64::NAN,
        max_violation: 0.0,
        infeasibility: certificate,
        infeasible_rows: rows,
        iterations,
    }
}

fn tableau_solution(tab: &Tableau, n: usize) -> Vector {
    let mut z = Vector::zeros(n);
    for r in 0..tab.rows {
        let b = tab.basis[r];
        if b < n {
            z[b] += tab.rhs(r);
        } else if b < 2 * n {
            z[b - n] -= tab.rhs(r);
        }
    }
    z
}

/// Re-solves `B x_B = b` on the original standard-form columns of the final
/// basis. Rows whose basic variable is a leftover artificial (redundant
/// equalities) are dropped.
fn refine_basic_solution(
    program: &LinearProgram,
    tab: &Tableau,
    sign: &[f64],
    n: usize,
    gi: usize,
) -> Option<Vector> {
    let n_struct = 2 * n + gi;
    let keep: Vec<usize> = (0..tab.rows).filter(|&r| tab.basis[r] < n_struct).collect();
    let k = keep.len();
    if k == 0 {
        return Some(Vector::zeros(n));
    }
    let basic: Vec<usize> = keep.iter().map(|&r| tab.basis[r]).collect();
    let column = |row: usize, col: usize| -> f64 {
        let s = sign[row];
        if col < 2 * n {
            let j = col % n;
            let a = if row < gi {
                program.ineq_matrix[(row, j)]
            } else {
                program.eq_matrix[(row - gi, j)]
            };
            if col < n {
                a * s
            } else {
                -a * s
            }
        } else if row < gi && col - 2 * n == row {
            s
        } else {
            0.0
        }
    };
    let bmat = Matrix::from_fn(k, k, |i, j| column(keep[i], basic[j]));
    let rhs = Vector::from_fn(k, |i, _| {
        let r = keep[i];
        let v = if r < gi {
            program.ineq_rhs[r]
        } else {
            program.eq_rhs[r - gi]
        };
        v * sign[r]
    });
    let xb = bmat.lu().solve(&rhs)?;
    let mut z = Vector::zeros(n);
    for (j, &b) in basic.iter().enumerate() {
        if b < n {
            z[b] += xb[j];
        } else if b < 2 * n {
            z[b - n] -= xb[j];
        }
    }
    let refined = program.max_violation(&z);
    let raw = program.max_violation(&tableau_solution(tab, n));
    if refined.is_finite() && refined <= raw {
        Some(z)
    } else {
        None
    }
}

/// Solves `program` with the reference simplex.
pub fn solve_lp(program: &LinearProgram) -> LpResult {
    DenseSimplex::default().solve(program)
}

/// Phase-1 emptiness test for `{z : H z <= h}`.
pub fn is_empty(polytope: &HPolytope) -> bool {
    let Ok(program) = LinearProgram::feasibility(polytope.h_matrix().clone(), polytope.h_vector().clone())
    else {
        return true;
    };
    solve_lp(&program).status == LpStatus::Infeasible
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{dmatrix, dvector};

    #[test]
    fn maximize_bounded_variable() {
        let p = LinearProgram::new(
            dvector![-1.0],
            dmatrix![1.0],
            dvector![1.0],
            Matrix::zeros(0, 1),
            Vector::zeros(0),
        )
        .unwrap();
        let r = solve_lp(&p);
        assert_eq!(r.status, LpStatus::Optimal);
        assert!((r.z_star.unwrap()[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn minimize_on_unit_box() {
        let g = dmatrix![1.0, 0.0; -1.0, 0.0; 0.0, 1.0; 0.0, -1.0];
        let p = LinearProgram::new(
            dvector![1.0, 1.0],
            g,
            dvector![1.0, 0.0, 1.0, 0.0],
            Matrix::zeros(0, 2),
            Vector::zeros(0),
        )
        .unwrap();
        let r = solve_lp(&p);
        assert_eq!(r.status, LpStatus::Optimal);
        assert!(r.objective_value.abs() < 1e-12);
        assert!(r.z_star.unwrap().amax() < 1e-12);
    }

    #[test]
    fn contradictory_bounds_are_infeasible() {
        let p = LinearProgram::feasibility(dmatrix![1.0; -1.0], dvector![0.0, -1.0]).unwrap();
        let r = solve_lp(&p);
        assert_eq!(r.status, LpStatus::Infeasible);
        assert!(r.infeasibility > FEASIBILITY_TOL);
        assert!(!r.infeasible_rows.is_empty());
    }

    #[test]
    fn unbounded_detected() {
        let p = LinearProgram::new(
            dvector![-1.0, 0.0],
            dmatrix![0.0, 1.0],
            dvector![1.0],
            Matrix::zeros(0, 2),
            Vector::zeros(0),
        )
        .unwrap();
        assert_eq!(solve_lp(&p).status, LpStatus::Unbounded);
    }

    #[test]
    fn equalities_and_redundant_rows() {
        // x + y = 2 twice (redundant), x - y = 0, minimize x.
        let p = LinearProgram::new(
            dvector![1.0, 0.0],
            Matrix::zeros(0, 2),
            Vector::zeros(0),
            dmatrix![1.0, 1.0; 2.0, 2.0; 1.0, -1.0],
            dvector![2.0, 4.0, 0.0],
        )
        .unwrap();
        let r = solve_lp(&p);
        assert_eq!(r.status, LpStatus::Optimal);
        let z = r.z_star.unwrap();
        assert!((z[0] - 1.0).abs() < 1e-12 && (z[1] - 1.0).abs() < 1e-12);
        assert!(r.max_violation <= FEASIBILITY_TOL);
    }

    #[test]
    fn negative_equality_rhs() {
        let p = LinearProgram::new(
            dvector![0.0, 1.0],
            dmatrix![0.0, -1.0],
            dvector![5.0],
            dmatrix![1.0, 1.0],
            dvector![-3.0],
        )
        .unwrap();
        let r = solve_lp(&p);
        assert_eq!(r.status, LpStatus::Optimal);
        let z = r.z_star.unwrap();
        assert!((z[1] + 5.0).abs() < 1e-12 && (z[0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn repeated_solves_are_bitwise_identical() {
        let g = dmatrix![1.0, 2.0; -3.0, 1.0; 0.5, -1.0; -1.0, -1.0];
        let p = LinearProgram::new(
            dvector![0.3, -0.7],
            g,
            dvector![4.0, 3.0, 2.0, 5.0],
            Matrix::zeros(0, 2),
            Vector::zeros(0),
        )
        .unwrap();
        let a = solve_lp(&p).z_star.unwrap();
        let b = solve_lp(&p).z_star.unwrap();
        assert_eq!(
            a.iter().map(|x| x.to_bits()).collect::<Vec<_>>(),
            b.iter().map(|x| x.to_bits()).collect::<Vec<_>>()
        );
    }

    #[test]
    fn builder_checks_dimensions() {
        assert!(LinearProgram::new(
            dvector![1.0],
            Matrix::zeros(1, 2),
            dvector![0.0],
            Matrix::zeros(0, 1),
            Vector::zeros(0)
        )
        .is_err());
        let mut b = LpBuilder::new(2);
        b.add_le(&[1.0, 0.0], 1.0);
        b.add_eq(&[1.0, 1.0], 0.5);
        b.set_objective(1, 1.0);
        let p = b.build().unwrap();
        assert_eq!(p.ineq_matrix.nrows(), 1);
        assert_eq!(p.eq_matrix.nrows(), 1);
    }

    #[test]
    fn emptiness() {
        assert!(!is_empty(&HPolytope::from_box(&[0.0, 0.0], &[1.0, 1.0]).unwrap()));
        let contradiction = HPolytope::new(dmatrix![1.0; -1.0], dvector![-1.0, -1.0]).unwrap();
        assert!(is_empty(&contradiction));
    }
}
