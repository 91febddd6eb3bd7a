//! H-polytopes and piecewise-constant assume/guarantee contracts.

use crate::error::{dim_err, Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::lp::{solve_lp, LinearProgram, LpStatus, FEASIBILITY_TOL};

/// `{z : H z <= h}`.
#[derive(Debug, Clone, PartialEq)]
pub struct HPolytope {
    h_matrix: Matrix,
    h_vector: Vector,
}

impl HPolytope {
    pub fn new(h_matrix: Matrix, h_vector: Vector) -> Result<Self> {
        if h_matrix.nrows() != h_vector.len() {
            return Err(dim_err("polytope rows", h_matrix.nrows(), h_vector.len()));
        }
        if h_matrix.iter().chain(h_vector.iter()).any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("polytope data"));
        }
        Ok(Self { h_matrix, h_vector })
    }

    /// Axis-aligned box `lower <= z <= upper`.
    pub fn from_box(lower: &[f64], upper: &[f64]) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(dim_err("box bounds", lower.len(), upper.len()));
        }
        let d = lower.len();
        if let Some(i) = (0..d).find(|&i| !(lower[i] <= upper[i])) {
            return Err(Error::InvalidContract(format!(
                "box coordinate {i}: lower bound {} exceeds upper bound {}",
                lower[i], upper[i]
            )));
        }
        let mut h_matrix = Matrix::zeros(2 * d, d);
        let mut h_vector = Vector::zeros(2 * d);
        for i in 0..d {
            h_matrix[(2 * i, i)] = 1.0;
            h_vector[2 * i] = upper[i];
            h_matrix[(2 * i + 1, i)] = -1.0;
            h_vector[2 * i + 1] = -lower[i];
        }
        Self::new(h_matrix, h_vector)
    }

    /// The whole space (no constraints).
    pub fn universe(dim: usize) -> Self {
        Self {
            h_matrix: Matrix::zeros(0, dim),
            h_vector: Vector::zeros(0),
        }
    }

    pub fn dim(&self) -> usize {
        self.h_matrix.ncols()
    }

    pub fn num_constraints(&self) -> usize {
        self.h_matrix.nrows()
    }

    pub fn h_matrix(&self) -> &Matrix {
        &self.h_matrix
    }

    pub fn h_vector(&self) -> &Vector {
        &self.h_vector
    }

    /// `max(0, max_i H_i z - h_i)`.
    pub fn violation(&self, z: &Vector) -> f64 {
        assert_eq!(z.len(), self.dim(), "point dimension");
        (&self.h_matrix * z - &self.h_vector)
            .iter()
            .fold(0.0_f64, |m, &v| m.max(v))
    }

    pub fn contains(&self, z: &Vector, tol: f64) -> bool {
        self.violation(z) <= tol
    }

    pub fn is_empty(&self) -> bool {
        crate::lp::is_empty(self)
    }

    /// Stacks the constraints of all `sets`, merging rows that are positive
    /// multiples of each other (the tighter right-hand side wins).
    pub fn intersect(sets: &[HPolytope]) -> Result<HPolytope> {
        let Some(first) = sets.first() else {
            return Err(Error::InvalidContract("intersection of zero sets".into()));
        };
        let d = first.dim();
        if let Some(bad) = sets.iter().find(|s| s.dim() != d) {
            return Err(dim_err("intersect operand dimension", d, bad.dim()));
        }
        let mut rows: Vec<(Vec<f64>, f64)> = Vec::new();
        for s in sets {
            for i in 0..s.num_constraints() {
                let row: Vec<f64> = s.h_matrix.row(i).iter().copied().collect();
                let norm = row.iter().map(|x| x * x).sum::<f64>().sqrt();
                let rhs = s.h_vector[i];
                if norm == 0.0 {
                    // 0 <= h is either vacuous or makes the set empty.
                    if rhs >= 0.0 {
                        continue;
                    }
                    rows.push((row, rhs));
                    continue;
                }
                let unit: Vec<f64> = row.iter().map(|x| x / norm).collect();
                let scaled = rhs / norm;
                match rows.iter_mut().find(|(r, _)| {
                    let n = r.iter().map(|x| x * x).sum::<f64>().sqrt();
                    n > 0.0 && r.iter().zip(&unit).all(|(a, b)| (a / n - b).abs() <= 1e-12)
                }) {
                    Some((r, h)) => {
                        let n = r.iter().map(|x| x * x).sum::<f64>().sqrt();
                        if scaled * n < *h {
                            *h = scaled * n;
                        }
                    }
                    None => rows.push((row, rhs)),
                }
            }
        }
        let mut h_matrix = Matrix::zeros(rows.len(), d);
        let mut h_vector = Vector::zeros(rows.len());
        for (i, (r, h)) in rows.iter().enumerate() {
            for (j, v) in r.iter().enumerate() {
                h_matrix[(i, j)] = *v;
            }
            h_vector[i] = *h;
        }
        HPolytope::new(h_matrix, h_vector)
    }

    fn support(&self, direction: &Vector) -> Option<f64> {
        // max direction . z over the set
        let program = LinearProgram::new(
            -direction,
            self.h_matrix.clone(),
            self.h_vector.clone(),
            Matrix::zeros(0, self.dim()),
            Vector::zeros(0),
        )
        .ok()?;
        let r = solve_lp(&program);
        match r.status {
            LpStatus::Optimal => Some(-r.objective_value),
            LpStatus::Unbounded => Some(f64::INFINITY),
            LpStatus::Infeasible => None,
        }
    }

    /// Removes constraints implied by the others (one LP per row).
    pub fn prune_redundant(&self) -> HPolytope {
        let mut keep: Vec<usize> = (0..self.num_constraints()).collect();
        let mut i = 0;
        while i < keep.len() {
            let row = keep[i];
            let others: Vec<usize> = keep.iter().copied().filter(|&r| r != row).collect();
            let sub = self.select_rows(&others);
            let dir = self.h_matrix.row(row).transpose();
            match sub.support(&dir) {
                Some(v) if v <= self.h_vector[row] + FEASIBILITY_TOL => {
                    keep.remove(i);
                }
                _ => i += 1,
            }
        }
        self.select_rows(&keep)
    }

    fn select_rows(&self, rows: &[usize]) -> HPolytope {
        HPolytope {
            h_matrix: self.h_matrix.select_rows(rows),
            h_vector: self.h_vector.select_rows(rows),
        }
    }

    /// `other ⊆ self` up to `tol`; an empty `other` is contained in anything.
    pub fn contains_polytope(&self, other: &HPolytope, tol: f64) -> Result<bool> {
        if other.dim() != self.dim() {
            return Err(dim_err("containment dimension", self.dim(), other.dim()));
        }
        for i in 0..self.num_constraints() {
            let dir = self.h_matrix.row(i).transpose();
            match other.support(&dir) {
                None => return Ok(true),
                Some(v) if v > self.h_vector[i] + tol => return Ok(false),
                Some(_) => {}
            }
        }
        Ok(true)
    }

    /// Centre and radius of the largest inscribed ball, `None` when empty.
    /// The radius is capped at `1e9` for unbounded sets.
    pub fn chebyshev_center(&self) -> Option<(Vector, f64)> {
        let d = self.dim();
        let rows = self.num_constraints();
        let mut g = Matrix::zeros(rows + 2, d + 1);
        let mut rhs = Vector::zeros(rows + 2);
        for i in 0..rows {
            for j in 0..d {
                g[(i, j)] = self.h_matrix[(i, j)];
            }
            g[(i, d)] = self.h_matrix.row(i).norm();
            rhs[i] = self.h_vector[i];
        }
        g[(rows, d)] = -1.0;
        g[(rows + 1, d)] = 1.0;
        rhs[rows + 1] = 1e9;
        let mut c = Vector::zeros(d + 1);
        c[d] = -1.0;
        let program = LinearProgram::new(c, g, rhs, Matrix::zeros(0, d + 1), Vector::zeros(0)).ok()?;
        let r = solve_lp(&program);
        let z = r.z_star?;
        Some((z.rows(0, d).into_owned(), z[d]))
    }

    /// Per-coordinate bounds; infinite where the set is unbounded.
    pub fn bounding_box(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        let d = self.dim();
        if let Some(b) = self.axis_box() {
            return Some(b);
        }
        let mut lo = vec![0.0; d];
        let mut hi = vec![0.0; d];
        for j in 0..d {
            let mut e = Vector::zeros(d);
            e[j] = 1.0;
            hi[j] = self.support(&e)?;
            lo[j] = -self.support(&-e)?;
        }
        Some((lo, hi))
    }

    /// Bounds read directly off the rows when every row is axis-aligned.
    fn axis_box(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        let d = self.dim();
        let mut lo = vec![f64::NEG_INFINITY; d];
        let mut hi = vec![f64::INFINITY; d];
        for i in 0..self.num_constraints() {
            let row = self.h_matrix.row(i);
            let nz: Vec<usize> = (0..d).filter(|&j| row[j] != 0.0).collect();
            if nz.len() != 1 {
                return None;
            }
            let j = nz[0];
            let a = row[j];
            let v = self.h_vector[i] / a;
            if a > 0.0 {
                hi[j] = hi[j].min(v);
            } else {
                lo[j] = lo[j].max(v);
            }
        }
        if (0..d).any(|j| lo[j] > hi[j]) {
            return None;
        }
        Some((lo, hi))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContractPiece {
    pub t_start: f64,
    pub t_end: f64,
    pub input_set: HPolytope,
    pub state_set: HPolytope,
}

/// Piecewise-constant contract on `[0, T]`. Piece `j` is active on
/// `[t_start, t_end)`, except the last piece, which is closed.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseContract {
    horizon: f64,
    pieces: Vec<ContractPiece>,
}

impl PiecewiseContract {
    pub fn new(horizon: f64, pieces: Vec<ContractPiece>) -> Result<Self> {
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::InvalidContract(format!("horizon must be positive, got {horizon}")));
        }
        let Some(first) = pieces.first() else {
            return Err(Error::InvalidContract("contract has no pieces".into()));
        };
        let eps = time_eps(horizon);
        let m = first.input_set.dim();
        let n = first.state_set.dim();
        if first.t_start.abs() > eps {
            return Err(Error::InvalidContract(format!(
                "first piece starts at {} instead of 0",
                first.t_start
            )));
        }
        for (j, p) in pieces.iter().enumerate() {
            if !(p.t_end > p.t_start) {
                return Err(Error::InvalidContract(format!(
                    "piece {j} has an empty interval [{}, {})",
                    p.t_start, p.t_end
                )));
            }
            if p.input_set.dim() != m || p.state_set.dim() != n {
                return Err(Error::InvalidContract(format!(
                    "piece {j} has set dimensions ({}, {}), expected ({m}, {n})",
                    p.input_set.dim(),
                    p.state_set.dim()
                )));
            }
            if j + 1 < pieces.len() && (pieces[j + 1].t_start - p.t_end).abs() > eps {
                return Err(Error::InvalidContract(format!(
                    "piece {} starts at {} but piece {j} ends at {}",
                    j + 1,
                    pieces[j + 1].t_start,
                    p.t_end
                )));
            }
            if p.input_set.is_empty() {
                return Err(Error::InvalidContract(format!("piece {j}: input set is empty")));
            }
            if p.state_set.is_empty() {
                return Err(Error::InvalidContract(format!("piece {j}: state set is empty")));
            }
        }
        let last = pieces.last().expect("nonempty");
        if (last.t_end - horizon).abs() > eps {
            return Err(Error::InvalidContract(format!(
                "last piece ends at {} instead of the horizon {horizon}",
                last.t_end
            )));
        }
        Ok(Self { horizon, pieces })
    }

    /// Single-piece contract over `[0, horizon]`.
    pub fn constant(horizon: f64, input_set: HPolytope, state_set: HPolytope) -> Result<Self> {
        Self::new(
            horizon,
            vec![ContractPiece {
                t_start: 0.0,
                t_end: horizon,
                input_set,
                state_set,
            }],
        )
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn pieces(&self) -> &[ContractPiece] {
        &self.pieces
    }

    pub fn input_dim(&self) -> usize {
        self.pieces[0].input_set.dim()
    }

    pub fn state_dim(&self) -> usize {
        self.pieces[0].state_set.dim()
    }

    /// Interior breakpoints (starts of pieces 1..).
    pub fn breakpoints(&self) -> Vec<f64> {
        self.pieces.iter().skip(1).map(|p| p.t_start).collect()
    }

    /// Index of the piece active at `t` (half-open convention).
    pub fn piece_at(&self, t: f64) -> usize {
        let eps = time_eps(self.horizon);
        self.pieces
            .iter()
            .position(|p| t < p.t_end - eps)
            .unwrap_or(self.pieces.len() - 1)
    }

    /// Pieces whose closed interval contains `t`; two at a breakpoint.
    pub fn pieces_touching(&self, t: f64) -> Vec<usize> {
        self.pieces_in_window(t, t, true)
    }

    /// Pieces meeting the window `[a, b]`. A piece starting exactly at `b`
    /// always counts; one ending exactly at `a` counts only with
    /// `closed_left`.
    pub fn pieces_in_window(&self, a: f64, b: f64, closed_left: bool) -> Vec<usize> {
        let eps = time_eps(self.horizon);
        let last = self.pieces.len() - 1;
        self.pieces
            .iter()
            .enumerate()
            .filter(|(j, p)| {
                let starts_before_end = p.t_start <= b + eps;
                let ends_after_start = if closed_left || *j == last {
                    p.t_end >= a - eps
                } else {
                    p.t_end > a + eps
                };
                starts_before_end && ends_after_start
            })
            .map(|(j, _)| j)
            .collect()
    }

    pub fn input_set_at(&self, t: f64) -> &HPolytope {
        &self.pieces[self.piece_at(t)].input_set
    }

    pub fn state_set_at(&self, t: f64) -> &HPolytope {
        &self.pieces[self.piece_at(t)].state_set
    }

    fn joint_nonempty(&self, range: std::ops::RangeInclusive<usize>) -> Result<bool> {
        let inputs: Vec<HPolytope> = self.pieces[range.clone()].iter().map(|p| p.input_set.clone()).collect();
        let states: Vec<HPolytope> = self.pieces[range].iter().map(|p| p.state_set.clone()).collect();
        Ok(!HPolytope::intersect(&inputs)?.is_empty() && !HPolytope::intersect(&states)?.is_empty())
    }
}

fn time_eps(horizon: f64) -> f64 {
    1e-9 * horizon.max(1.0)
}

/// Radii at one breakpoint: how far the contract can be followed backward
/// and forward from `time` while all visited pieces still share a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BreakpointRadii {
    pub time: f64,
    pub backward: f64,
    pub forward: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmoothnessReport {
    pub r_c: f64,
    pub min_ell: usize,
    /// Backward radius at the horizon.
    pub terminal_backward: f64,
    /// One entry per piece start, including `t = 0`.
    pub breakpoints: Vec<BreakpointRadii>,
}

/// Smoothness radii of a piecewise-constant contract.
///
/// From each piece start `b`, the forward radius runs until the first piece
/// whose addition empties the joint intersection (or to `T`). The backward
/// radius at `T` is computed the same way in reverse. `r_c` is the smallest
/// forward radius among breakpoints in `[0, T - backward(T)]`.
pub fn smoothness_analysis(contract: &PiecewiseContract) -> Result<SmoothnessReport> {
    let pieces = contract.pieces();
    let horizon = contract.horizon();
    let count = pieces.len();

    for j in 1..count {
        if !contract.joint_nonempty(j - 1..=j)? {
            return Err(Error::AssumptionViolated {
                time: pieces[j].t_start,
                detail: format!(
                    "pieces {} and {j} have disjoint input or state sets",
                    j - 1
                ),
            });
        }
    }

    // Largest `end` such that pieces start..=end jointly intersect.
    let forward_reach = |start: usize| -> Result<usize> {
        let mut end = start;
        while end + 1 < count && contract.joint_nonempty(start..=end + 1)? {
            end += 1;
        }
        Ok(end)
    };
    let backward_reach = |end: usize| -> Result<usize> {
        let mut start = end;
        while start > 0 && contract.joint_nonempty(start - 1..=end)? {
            start -= 1;
        }
        Ok(start)
    };

    let mut breakpoints = Vec::with_capacity(count);
    for (j, p) in pieces.iter().enumerate() {
        let b = p.t_start;
        let f = forward_reach(j)?;
        let forward = if f + 1 < count {
            pieces[f + 1].t_start - b
        } else {
            horizon - b
        };
        let backward = if j == 0 {
            0.0
        } else {
            let s = backward_reach(j)?;
            if s > 0 {
                b - pieces[s - 1].t_end
            } else {
                b
            }
        };
        breakpoints.push(BreakpointRadii {
            time: b,
            backward,
            forward,
        });
    }

    let s = backward_reach(count - 1)?;
    let terminal_backward = if s > 0 {
        horizon - pieces[s - 1].t_end
    } else {
        horizon
    };

    let eps = time_eps(horizon);
    let r_c = breakpoints
        .iter()
        .filter(|r| r.time <= horizon - terminal_backward + eps)
        .map(|r| r.forward)
        .fold(horizon, f64::min);
    let ratio = horizon / r_c;
    let mut min_ell = ratio.ceil() as usize;
    // Absorb round-off such as 5 / (5/3) = 3.0000000000000004.
    if min_ell > 1 && (ratio - (min_ell - 1) as f64) <= 1e-9 {
        min_ell -= 1;
    }
    Ok(SmoothnessReport {
        r_c,
        min_ell: min_ell.max(1),
        terminal_backward,
        breakpoints,
    })
}

/// `tau = T / ell_d` after checking `ell_d >= min_ell`.
pub fn select_sampling(contract: &PiecewiseContract, ell_d: usize) -> Result<f64> {
    let report = smoothness_analysis(contract)?;
    select_sampling_with(&report, contract.horizon(), ell_d)
}

pub fn select_sampling_with(report: &SmoothnessReport, horizon: f64, ell_d: usize) -> Result<f64> {
    if ell_d < report.min_ell {
        return Err(Error::SamplingTooCoarse {
            requested: ell_d,
            minimum: report.min_ell,
        });
    }
    Ok(horizon / ell_d as f64)
}

/// Indexed input/state sets for `k = 0..=ell`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteContract {
    pub tau: f64,
    pub ell: usize,
    pub input_sets: Vec<HPolytope>,
    pub state_sets: Vec<HPolytope>,
}

impl DiscreteContract {
    pub fn input_set(&self, k: usize) -> &HPolytope {
        &self.input_sets[k]
    }

    pub fn state_set(&self, k: usize) -> &HPolytope {
        &self.state_sets[k]
    }
}

/// Intersects the contract over each closed window `[k tau, (k+1) tau]`;
/// index `ell` holds the sets active at `T`.
pub fn discretize_contract(contract: &PiecewiseContract, tau: f64, ell_d: usize) -> Result<DiscreteContract> {
    let horizon = contract.horizon();
    if ell_d == 0 || !(tau > 0.0) || (ell_d as f64 * tau - horizon).abs() > 1e-12 * horizon.max(1.0) {
        return Err(Error::InvalidContract(format!(
            "ell_d * tau = {} * {tau} does not equal the horizon {horizon}",
            ell_d
        )));
    }
    let mut input_sets = Vec::with_capacity(ell_d + 1);
    let mut state_sets = Vec::with_capacity(ell_d + 1);
    for k in 0..=ell_d {
        let idx = if k < ell_d {
            let a = k as f64 * tau;
            let b = if k + 1 == ell_d { horizon } else { (k + 1) as f64 * tau };
            contract.pieces_in_window(a, b, false)
        } else {
            vec![contract.pieces().len() - 1]
        };
        let inputs: Vec<HPolytope> = idx.iter().map(|&j| contract.pieces()[j].input_set.clone()).collect();
        let states: Vec<HPolytope> = idx.iter().map(|&j| contract.pieces()[j].state_set.clone()).collect();
        let a_k = HPolytope::intersect(&inputs)?;
        let g_k = HPolytope::intersect(&states)?;
        if a_k.is_empty() {
            return Err(Error::EmptyDiscreteSet { which: "input", k });
        }
        if g_k.is_empty() {
            return Err(Error::EmptyDiscreteSet { which: "state", k });
        }
        input_sets.push(a_k);
        state_sets.push(g_k);
    }
    Ok(DiscreteContract {
        tau,
        ell: ell_d,
        input_sets,
        state_sets,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dvector;

    fn bx(lo: &[f64], hi: &[f64]) -> HPolytope {
        HPolytope::from_box(lo, hi).unwrap()
    }

    fn robot_contract() -> PiecewiseContract {
        let xy = [
            ([0.0, 0.0], [1.5, 1.5]),
            ([0.5, 0.5], [2.0, 1.5]),
            ([1.0, -1.0], [2.5, 3.0]),
            ([-1.0, -1.0], [1.5, 0.75]),
            ([-2.0, -2.0], [1.25, 0.0]),
        ];
        let pieces = xy
            .iter()
            .enumerate()
            .map(|(j, (lo, hi))| ContractPiece {
                t_start: j as f64,
                t_end: j as f64 + 1.0,
                input_set: bx(&[-5.0, -5.0], &[5.0, 5.0]),
                state_set: bx(&[lo[0], lo[1], -2.0, -2.0], &[hi[0], hi[1], 2.0, 2.0]),
            })
            .collect();
        PiecewiseContract::new(5.0, pieces).unwrap()
    }

    #[test]
    fn box_intersection() {
        let s = HPolytope::intersect(&[bx(&[0.0, 0.0], &[1.5, 1.5]), bx(&[0.5, 0.5], &[2.0, 1.5])]).unwrap();
        assert_eq!(s.num_constraints(), 4);
        let (lo, hi) = s.bounding_box().unwrap();
        assert_eq!(lo, vec![0.5, 0.5]);
        assert_eq!(hi, vec![1.5, 1.5]);
    }

    #[test]
    fn self_intersection_is_identity() {
        let tri = HPolytope::new(
            nalgebra::dmatrix![1.0, 1.0; -1.0, 0.0; 0.0, -1.0],
            dvector![1.0, 0.0, 0.0],
        )
        .unwrap();
        let both = HPolytope::intersect(&[tri.clone(), tri.clone()]).unwrap();
        assert!(both.contains_polytope(&tri, 1e-9).unwrap());
        assert!(tri.contains_polytope(&both, 1e-9).unwrap());
    }

    #[test]
    fn disjoint_boxes_are_empty() {
        let s = HPolytope::intersect(&[bx(&[0.0], &[1.0]), bx(&[2.0], &[3.0])]).unwrap();
        assert!(s.is_empty());
        assert!(s.chebyshev_center().is_none());
    }

    #[test]
    fn intersect_rejects_mixed_dimensions() {
        assert!(HPolytope::intersect(&[bx(&[0.0], &[1.0]), bx(&[0.0, 0.0], &[1.0, 1.0])]).is_err());
    }

    #[test]
    fn chebyshev_and_pruning() {
        let (c, r) = bx(&[0.0, 0.0], &[2.0, 4.0]).chebyshev_center().unwrap();
        assert!((r - 1.0).abs() < 1e-9);
        assert!((c[0] - 1.0).abs() < 1e-9);
        let redundant = HPolytope::new(
            nalgebra::dmatrix![1.0, 0.0; -1.0, 0.0; 1.0, 1.0; 0.0, 1.0; 0.0, -1.0],
            dvector![1.0, 0.0, 10.0, 1.0, 0.0],
        )
        .unwrap();
        assert_eq!(redundant.prune_redundant().num_constraints(), 4);
        let (_, r0) = bx(&[1.0], &[1.0]).chebyshev_center().unwrap();
        assert!(r0.abs() < 1e-12);
    }

    #[test]
    fn robot_smoothness() {
        let c = robot_contract();
        let r = smoothness_analysis(&c).unwrap();
        assert!((r.terminal_backward - 3.0).abs() < 1e-12);
        assert!((r.r_c - 3.0).abs() < 1e-12);
        assert_eq!(r.min_ell, 2);
        assert_eq!(r.breakpoints.len(), 5);
    }

    #[test]
    fn single_piece_smoothness() {
        let c = PiecewiseContract::constant(2.5, bx(&[-1.0], &[1.0]), bx(&[-1.0], &[1.0])).unwrap();
        let r = smoothness_analysis(&c).unwrap();
        assert_eq!(r.r_c, 2.5);
        assert_eq!(r.min_ell, 1);
    }

    #[test]
    fn disjoint_neighbours_violate_assumption() {
        let pieces = vec![
            ContractPiece {
                t_start: 0.0,
                t_end: 1.0,
                input_set: bx(&[-1.0], &[1.0]),
                state_set: bx(&[0.0], &[1.0]),
            },
            ContractPiece {
                t_start: 1.0,
                t_end: 2.0,
                input_set: bx(&[-1.0], &[1.0]),
                state_set: bx(&[2.0], &[3.0]),
            },
        ];
        let c = PiecewiseContract::new(2.0, pieces).unwrap();
        match smoothness_analysis(&c) {
            Err(Error::AssumptionViolated { time, .. }) => assert_eq!(time, 1.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn sampling_selection() {
        let c = robot_contract();
        assert_eq!(select_sampling(&c, 5).unwrap(), 1.0);
        assert!(matches!(
            select_sampling(&c, 1),
            Err(Error::SamplingTooCoarse { requested: 1, minimum: 2 })
        ));
        let one = PiecewiseContract::constant(1.0, bx(&[0.0], &[1.0]), bx(&[0.0], &[1.0])).unwrap();
        assert_eq!(select_sampling(&one, 1).unwrap(), 1.0);
    }

    #[test]
    fn robot_discretization() {
        let c = robot_contract();
        let d = discretize_contract(&c, 1.0, 5).unwrap();
        assert_eq!(d.state_sets.len(), 6);
        let (lo, hi) = d.state_set(0).bounding_box().unwrap();
        assert_eq!(lo, vec![0.5, 0.5, -2.0, -2.0]);
        assert_eq!(hi, vec![1.5, 1.5, 2.0, 2.0]);
        for k in 0..=5 {
            let (lo, hi) = d.input_set(k).bounding_box().unwrap();
            assert_eq!(lo, vec![-5.0, -5.0]);
            assert_eq!(hi, vec![5.0, 5.0]);
        }
        // terminal index uses the sets at T
        assert_eq!(d.state_set(5), &c.pieces()[4].state_set);
        let (lo4, hi4) = d.state_set(4).bounding_box().unwrap();
        assert_eq!(lo4[..2], [-2.0, -2.0]);
        assert_eq!(hi4[..2], [1.25, 0.0]);
    }

    #[test]
    fn discretization_is_monotone() {
        let c = robot_contract();
        let d = discretize_contract(&c, 0.5, 10).unwrap();
        for k in 0..10 {
            for s in 0..=10 {
                let t = 0.5 * k as f64 + 0.05 * s as f64;
                assert!(c.state_set_at(t).contains_polytope(d.state_set(k), 1e-9).unwrap());
                assert!(c.input_set_at(t).contains_polytope(d.input_set(k), 1e-9).unwrap());
            }
            let (_, r) = d.state_set(k).chebyshev_center().unwrap();
            assert!(r >= 0.0);
        }
    }

    #[test]
    fn constant_contract_discretizes_to_itself() {
        let a = bx(&[-1.0, -2.0], &[1.0, 2.0]);
        let g = bx(&[-3.0], &[3.0]);
        let c = PiecewiseContract::constant(4.0, a.clone(), g.clone()).unwrap();
        let d = discretize_contract(&c, 1.0, 4).unwrap();
        for k in 0..=4 {
            assert_eq!(d.input_set(k), &a);
            assert_eq!(d.state_set(k), &g);
        }
        assert!(discretize_contract(&c, 1.0, 3).is_err());
    }

    #[test]
    fn contract_validation() {
        let p = |s: f64, e: f64| ContractPiece {
            t_start: s,
            t_end: e,
            input_set: bx(&[0.0], &[1.0]),
            state_set: bx(&[0.0], &[1.0]),
        };
        assert!(PiecewiseContract::new(2.0, vec![p(0.0, 1.0), p(1.5, 2.0)]).is_err());
        assert!(PiecewiseContract::new(2.0, vec![p(0.5, 2.0)]).is_err());
        assert!(PiecewiseContract::new(2.0, vec![p(0.0, 1.0)]).is_err());
        assert!(PiecewiseContract::new(-1.0, vec![p(0.0, 1.0)]).is_err());
        let c = PiecewiseContract::new(2.0, vec![p(0.0, 1.0), p(1.0, 2.0)]).unwrap();
        assert_eq!(c.piece_at(0.99), 0);
        assert_eq!(c.piece_at(1.0), 1);
        assert_eq!(c.piece_at(2.0), 1);
        assert_eq!(c.pieces_touching(1.0), vec![0, 1]);
        assert_eq!(c.pieces_touching(2.0), vec![1]);
        assert_eq!(c.pieces_in_window(0.0, 1.0, false), vec![0, 1]);
        assert_eq!(c.pieces_in_window(1.0, 2.0, false), vec![1]);
    }
}
