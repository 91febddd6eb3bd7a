//! Independent certification of a synthesized input.
//!
//! The state is recomputed by exact simulation: on each segment the input is
//! a polynomial in `s = (t - kτ) / τ`, so appending the monomials
//! `z = (1, s, ..., s^N)` with their nilpotent shift dynamics turns the
//! forced response into one matrix exponential per grid step.

use crate::bernstein::build_bernstein;
use crate::contracts::{discretize_contract, PiecewiseContract};
use crate::error::{dim_err, Error, Result};
use crate::linalg::{expm, Matrix, Vector};
use crate::synthesis::SynthesisResult;
use crate::system::LtiSystem;
use crate::trajectory::PiecewisePolynomial;

pub const DEFAULT_GRID_POINTS: usize = 200;
pub const DEFAULT_MEMBERSHIP_TOL: f64 = 1e-7;
pub const MISMATCH_TOL: f64 = 1e-6;
const CERTIFIED_TOL: f64 = 1e-8;

/// Generator of the augmented dynamics on one segment.
fn augmented_generator(sys: &LtiSystem, mono: &Matrix, tau: f64) -> Matrix {
    let n = sys.state_dim();
    let p = mono.ncols();
    let mut g = Matrix::zeros(n + p, n + p);
    g.view_mut((0, 0), (n, n)).copy_from(sys.a());
    g.view_mut((0, n), (n, p)).copy_from(&(sys.b() * mono));
    for q in 1..p {
        g[(n + q, n + q - 1)] = q as f64 / tau;
    }
    g
}

/// Exact state at every time in `grid` under the piecewise-polynomial
/// input `u_c`, starting from `x0` at `t = 0`.
pub fn exact_simulate(sys_c: &LtiSystem, x0: &Vector, u_c: &PiecewisePolynomial, grid: &[f64]) -> Result<Vec<Vector>> {
    let n = sys_c.state_dim();
    if x0.len() != n {
        return Err(dim_err("initial state", n, x0.len()));
    }
    if u_c.dim() != sys_c.input_dim() {
        return Err(dim_err("input polynomial dimension", sys_c.input_dim(), u_c.dim()));
    }
    let tau = u_c.tau();
    let segs = u_c.segments().len();
    let p = u_c.basis().degree() + 1;
    let generators: Vec<Matrix> = (0..segs)
        .map(|k| augmented_generator(sys_c, &u_c.monomial_coefficients(k), tau))
        .collect();

    let mut order: Vec<usize> = (0..grid.len()).collect();
    order.sort_by(|&a, &b| grid[a].total_cmp(&grid[b]));
    let mut out = vec![Vector::zeros(n); grid.len()];

    let fresh = |x: &Vector| {
        let mut xi = Vector::zeros(n + p);
        xi.rows_mut(0, n).copy_from(x);
        xi[n] = 1.0;
        xi
    };
    let mut k = 0;
    let mut local = 0.0;
    let mut xi = fresh(x0);
    for idx in order {
        let (target_k, target_local) = u_c.locate(grid[idx])?;
        while k < target_k {
            let step = tau - local;
            if step > 0.0 {
                xi = expm(&(&generators[k] * step))? * &xi;
            }
            let x = xi.rows(0, n).into_owned();
            k += 1;
            local = 0.0;
            xi = fresh(&x);
        }
        let step = target_local - local;
        if step > 0.0 {
            xi = expm(&(&generators[k] * step))? * &xi;
            local = target_local;
        }
        out[idx] = xi.rows(0, n).into_owned();
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub grid_points_per_segment: usize,
    pub tolerance: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            grid_points_per_segment: DEFAULT_GRID_POINTS,
            tolerance: DEFAULT_MEMBERSHIP_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    /// Both sampled violations within `tolerance`.
    pub implements: bool,
    pub max_input_violation: f64,
    pub max_state_violation: f64,
    /// Sup-norm gap between the polynomial state and exact simulation.
    pub max_trajectory_mismatch: f64,
    pub grid_points_per_segment: usize,
    pub grid_size: usize,
    pub tolerance: f64,
    /// Time of the largest input or state violation.
    pub worst_time: f64,
    /// Control points of every segment lie in the discretized sets.
    pub certified: bool,
    pub max_control_point_violation: f64,
}

/// Uniform points per segment, every breakpoint, every collocation node
/// and the horizon, sorted and deduplicated.
pub fn verification_grid(u_c: &PiecewisePolynomial, contract: &PiecewiseContract, points_per_segment: usize) -> Vec<f64> {
    let tau = u_c.tau();
    let segs = u_c.segments().len();
    let pts = points_per_segment.max(1);
    let mut grid = Vec::with_capacity(segs * (pts + u_c.basis().nodes().len()) + 8);
    for k in 0..segs {
        let start = k as f64 * tau;
        for i in 0..pts {
            grid.push(start + tau * i as f64 / pts as f64);
        }
        for &node in u_c.basis().nodes() {
            grid.push(start + node);
        }
    }
    grid.push(u_c.horizon());
    grid.extend(contract.breakpoints());
    grid.retain(|&t| t <= u_c.horizon());
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid
}

/// Certifies an input (and optionally its polynomial state) against the
/// contract on a dense grid, and separately checks the Bernstein control
/// points against the discretized contract.
pub fn certify_trajectory(
    sys_c: &LtiSystem,
    contract: &PiecewiseContract,
    x0: &Vector,
    u_c: &PiecewisePolynomial,
    x_c: Option<&PiecewisePolynomial>,
    options: VerifyOptions,
) -> Result<VerificationReport> {
    if contract.input_dim() != sys_c.input_dim() || contract.state_dim() != sys_c.state_dim() {
        return Err(dim_err(
            "contract dimensions",
            format!("({}, {})", sys_c.input_dim(), sys_c.state_dim()),
            format!("({}, {})", contract.input_dim(), contract.state_dim()),
        ));
    }
    if (u_c.horizon() - contract.horizon()).abs() > 1e-9 * contract.horizon().max(1.0) {
        return Err(Error::InvalidContract(format!(
            "input covers [0, {}] but the contract horizon is {}",
            u_c.horizon(),
            contract.horizon()
        )));
    }
    let grid = verification_grid(u_c, contract, options.grid_points_per_segment);
    let exact = exact_simulate(sys_c, x0, u_c, &grid)?;

    let mut max_input = 0.0_f64;
    let mut max_state = 0.0_f64;
    let mut mismatch = 0.0_f64;
    let mut worst_time = 0.0;
    let mut worst = 0.0_f64;
    for (i, &t) in grid.iter().enumerate() {
        let u = u_c.eval(t)?;
        let poly_x = match x_c {
            Some(xc) => Some(xc.eval(t)?),
            None => None,
        };
        if let Some(px) = &poly_x {
            mismatch = mismatch.max((px - &exact[i]).amax());
        }
        for j in contract.pieces_touching(t) {
            let piece = &contract.pieces()[j];
            let vu = piece.input_set.violation(&u);
            let mut vx = piece.state_set.violation(&exact[i]);
            if let Some(px) = &poly_x {
                vx = vx.max(piece.state_set.violation(px));
            }
            max_input = max_input.max(vu);
            max_state = max_state.max(vx);
            if vu.max(vx) > worst {
                worst = vu.max(vx);
                worst_time = t;
            }
        }
    }

    let (certified, cp_violation) = control_point_evidence(contract, x0, u_c, x_c)?;
    Ok(VerificationReport {
        implements: max_input <= options.tolerance && max_state <= options.tolerance,
        max_input_violation: max_input,
        max_state_violation: max_state,
        max_trajectory_mismatch: mismatch,
        grid_points_per_segment: options.grid_points_per_segment,
        grid_size: grid.len(),
        tolerance: options.tolerance,
        worst_time,
        certified,
        max_control_point_violation: cp_violation,
    })
}

fn control_point_evidence(
    contract: &PiecewiseContract,
    x0: &Vector,
    u_c: &PiecewisePolynomial,
    x_c: Option<&PiecewisePolynomial>,
) -> Result<(bool, f64)> {
    let Some(x_c) = x_c else {
        return Ok((false, f64::INFINITY));
    };
    let ell = u_c.segments().len();
    let Ok(dc) = discretize_contract(contract, u_c.tau(), ell) else {
        return Ok((false, f64::INFINITY));
    };
    let bern = build_bernstein(u_c.basis())?;
    let mut violation = 0.0_f64;
    if (&x_c.segments()[0].value_at_0 - x0).amax() > CERTIFIED_TOL {
        return Ok((false, f64::INFINITY));
    }
    for k in 0..ell {
        let us = &u_c.segments()[k];
        let xs = &x_c.segments()[k];
        let v = bern.control_points(&us.value_at_0, &us.coeffs)?;
        let w = bern.control_points(&xs.value_at_0, &xs.coeffs)?;
        for j in 0..v.ncols() {
            violation = violation
                .max(dc.input_set(k).violation(&v.column(j).into_owned()))
                .max(dc.state_set(k).violation(&w.column(j).into_owned()));
        }
    }
    Ok((violation <= CERTIFIED_TOL, violation))
}

/// Certifies a synthesis result with default options.
pub fn certify(result: &SynthesisResult, contract: &PiecewiseContract, sys_c: &LtiSystem, x0: &Vector) -> Result<VerificationReport> {
    certify_with(result, contract, sys_c, x0, VerifyOptions::default())
}

pub fn certify_with(
    result: &SynthesisResult,
    contract: &PiecewiseContract,
    sys_c: &LtiSystem,
    x0: &Vector,
    options: VerifyOptions,
) -> Result<VerificationReport> {
    certify_trajectory(sys_c, contract, x0, &result.u_c, Some(&result.x_c), options)
}

/// Largest `|x' - A x - B u|` of the polynomial pair at the given times.
pub fn collocation_residual(
    sys_c: &LtiSystem,
    u_c: &PiecewisePolynomial,
    x_c: &PiecewisePolynomial,
    times: &[f64],
) -> Result<f64> {
    let mut worst = 0.0_f64;
    for &t in times {
        let (k, s) = x_c.locate(t)?;
        let x = x_c.eval_segment(k, s)?;
        let dx = x_c.derivative_segment(k, s)?;
        let u = u_c.eval_segment(k, s)?;
        worst = worst.max((dx - sys_c.a() * x - sys_c.b() * u).amax());
    }
    Ok(worst)
}
