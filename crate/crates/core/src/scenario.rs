//! Built-in planar robot example: two decoupled double integrators with
//! state `(x, y, v_x, v_y)` and input `(F_x, F_y)`.

use crate::contracts::{ContractPiece, HPolytope, PiecewiseContract};
use crate::linalg::{Matrix, Vector};
use crate::synthesis::SynthesisProblem;
use crate::system::LtiSystem;

pub const ROBOT_HORIZON: f64 = 5.0;
pub const ROBOT_ELL: usize = 5;
pub const ROBOT_DEGREE: usize = 5;
pub const ROBOT_INPUT_BOUND: f64 = 5.0;

/// Position boxes `([x_lo, y_lo], [x_hi, y_hi])` on `[j, j + 1)`.
pub const ROBOT_POSITION_BOXES: [([f64; 2], [f64; 2]); 5] = [
    ([0.0, 0.0], [1.5, 1.5]),
    ([0.5, 0.5], [2.0, 1.5]),
    ([1.0, -1.0], [2.5, 3.0]),
    ([-1.0, -1.0], [1.5, 0.75]),
    ([-2.0, -2.0], [1.25, 0.0]),
];

pub const ROBOT_SPEED_BOUND: f64 = 2.0;

pub fn robot_system() -> LtiSystem {
    let mut a = Matrix::zeros(4, 4);
    a[(0, 2)] = 1.0;
    a[(1, 3)] = 1.0;
    let mut b = Matrix::zeros(4, 2);
    b[(2, 0)] = 1.0;
    b[(3, 1)] = 1.0;
    LtiSystem::continuous(a, b).expect("static robot model")
}

/// Robot contract with forces limited to `[-input_bound, input_bound]`.
pub fn robot_contract(input_bound: f64) -> PiecewiseContract {
    let v = ROBOT_SPEED_BOUND;
    let pieces = ROBOT_POSITION_BOXES
        .iter()
        .enumerate()
        .map(|(j, (lo, hi))| ContractPiece {
            t_start: j as f64,
            t_end: j as f64 + 1.0,
            input_set: HPolytope::from_box(&[-input_bound; 2], &[input_bound; 2]).expect("input box"),
            state_set: HPolytope::from_box(&[lo[0], lo[1], -v, -v], &[hi[0], hi[1], v, v]).expect("state box"),
        })
        .collect();
    PiecewiseContract::new(ROBOT_HORIZON, pieces).expect("static robot contract")
}

/// At rest at `(1, 1)`.
pub fn robot_initial_state() -> Vector {
    Vector::from_vec(vec![1.0, 1.0, 0.0, 0.0])
}

pub fn robot_problem(input_bound: f64) -> SynthesisProblem {
    SynthesisProblem::new(
        robot_system(),
        robot_contract(input_bound),
        robot_initial_state(),
        ROBOT_ELL,
        ROBOT_DEGREE,
    )
}

/// Randomly generated problem that is feasible by construction.
#[derive(Debug, Clone)]
pub struct RandomInstance {
    pub problem: SynthesisProblem,
    /// Input sequence the contract was built around.
    pub witness_u_d: Vec<Vector>,
}

fn controllable(sys: &LtiSystem) -> bool {
    let n = sys.state_dim();
    let m = sys.input_dim();
    let mut ctrb = Matrix::zeros(n, n * m);
    let mut block = sys.b().clone();
    for i in 0..n {
        ctrb.columns_mut(i * m, m).copy_from(&block);
        block = sys.a() * block;
    }
    let sv = ctrb.singular_values();
    let smax = sv.max();
    smax > 0.0 && sv.iter().filter(|&&s| s > 1e-6 * smax).count() == n
}

/// Draws a controllable system and a piecewise-box contract around a random
/// lifted trajectory, so the witness input satisfies every synthesis
/// constraint. `uniform` must return samples from `[0, 1)`.
///
/// Returns `None` when no degree up to `max_degree` interpolates the drawn
/// system or the witness cannot be lifted.
pub fn random_feasible_instance(
    uniform: &mut impl FnMut() -> f64,
    state_dims: std::ops::RangeInclusive<usize>,
    input_dims: std::ops::RangeInclusive<usize>,
    max_degree: usize,
) -> Option<RandomInstance> {
    use crate::bernstein::build_bernstein;
    use crate::interpolation::{assemble_trajectory, build_operator, design_discrete};

    let mut pick = |lo: usize, hi: usize| lo + ((uniform() * (hi - lo + 1) as f64) as usize).min(hi - lo);
    let n = pick(*state_dims.start(), *state_dims.end());
    let m = pick(*input_dims.start(), *input_dims.end()).min(n);
    let ell = pick(3, 5);
    let mut sym = |scale: f64| scale * (2.0 * uniform() - 1.0);
    let a = Matrix::from_fn(n, n, |_, _| sym(1.0));
    let b = Matrix::from_fn(n, m, |_, _| sym(1.0));
    let x0 = Vector::from_fn(n, |_, _| sym(1.0));
    let u_d: Vec<Vector> = (0..=ell).map(|_| Vector::from_fn(m, |_, _| sym(1.0))).collect();
    let tau = 0.5 + 0.5 * uniform();
    let margin = 0.05 + 0.25 * uniform();
    let split: Vec<bool> = (0..ell).map(|_| uniform() < 0.6).collect();

    let system = LtiSystem::continuous(a, b).ok()?;
    if !controllable(&system) {
        return None;
    }
    let (degree, op, sys_d) = (1..=max_degree).find_map(|deg| {
        let op = build_operator(&system, deg, tau).ok()?;
        let sys_d = design_discrete(&op).ok()?;
        Some((deg, op, sys_d))
    })?;
    let lifted = assemble_trajectory(&op, &sys_d, &x0, &u_d).ok()?;
    let bern = build_bernstein(op.basis()).ok()?;
    let mut points_u = Vec::with_capacity(ell);
    let mut points_x = Vec::with_capacity(ell);
    for seg in &lifted.segments {
        points_u.push(bern.control_points(&u_d[seg.k], &seg.u).ok()?);
        points_x.push(bern.control_points(&lifted.x_d[seg.k], &seg.x).ok()?);
    }

    // Piece boundaries at segment starts; a piece ends where `split` says so.
    let mut starts = vec![0usize];
    for (k, &cut) in split.iter().enumerate().skip(1) {
        if cut {
            starts.push(k);
        }
    }
    let horizon = ell as f64 * tau;
    let bounds = |pts: &[Matrix], from: usize, to: usize| {
        let d = pts[0].nrows();
        let mut lo = vec![f64::INFINITY; d];
        let mut hi = vec![f64::NEG_INFINITY; d];
        for p in &pts[from..to] {
            for j in 0..p.ncols() {
                for i in 0..d {
                    lo[i] = lo[i].min(p[(i, j)]);
                    hi[i] = hi[i].max(p[(i, j)]);
                }
            }
        }
        for i in 0..d {
            let pad = margin * (1.0 + 0.1 * (hi[i] - lo[i]));
            lo[i] -= pad;
            hi[i] += pad;
        }
        (lo, hi)
    };
    let mut pieces = Vec::with_capacity(starts.len());
    for (p, &s0) in starts.iter().enumerate() {
        let s1 = starts.get(p + 1).copied().unwrap_or(ell);
        // Segments whose closed window meets this piece.
        let from = s0.saturating_sub(1);
        let (ulo, uhi) = bounds(&points_u, from, s1);
        let (xlo, xhi) = bounds(&points_x, from, s1);
        pieces.push(ContractPiece {
            t_start: s0 as f64 * tau,
            t_end: if s1 == ell { horizon } else { s1 as f64 * tau },
            input_set: HPolytope::from_box(&ulo, &uhi).ok()?,
            state_set: HPolytope::from_box(&xlo, &xhi).ok()?,
        });
    }
    let contract = PiecewiseContract::new(horizon, pieces).ok()?;
    Some(RandomInstance {
        problem: SynthesisProblem::new(system, contract, x0, ell, degree),
        witness_u_d: u_d,
    })
}
