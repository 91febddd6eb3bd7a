//! Continuous-time safety controller synthesis for linear systems through
//! contract discretization and collocation-based system interpolation.
//!
//! The pipeline: a piecewise-constant polytopic contract is sampled into a
//! discrete contract, a discrete-time model is designed so that every
//! discrete trajectory lifts to an exact piecewise-polynomial trajectory of
//! the continuous system, and a linear program over the discrete trajectory
//! with Bernstein control-point constraints produces an input that keeps the
//! continuous system inside the contract at every instant.
//!
//! ```
//! use contract_synth::scenario::robot_problem;
//! use contract_synth::{certify, synthesize};
//!
//! let problem = robot_problem(5.0);
//! let result = synthesize(&problem).unwrap();
//! let report = certify(&result, &problem.contract, &problem.system, &problem.x0).unwrap();
//! assert!(report.implements);
//! ```

pub mod bernstein;
pub mod contracts;
pub mod error;
pub mod interpolation;
pub mod linalg;
pub mod lp;
pub mod poly_basis;
pub mod scenario;
pub mod synthesis;
pub mod system;
pub mod trajectory;
pub mod verify;

pub use contracts::{
    discretize_contract, select_sampling, smoothness_analysis, ContractPiece, DiscreteContract, HPolytope,
    PiecewiseContract, SmoothnessReport,
};
pub use error::{Error, Result};
pub use interpolation::{
    assemble_trajectory, build_operator, check_interpolator, design_discrete, solve_segment, DesignSelection,
    InterpolationOperator, SegmentSolution,
};
pub use linalg::{Matrix, Vector};
pub use lp::{solve_lp, LinearProgram, LpResult, LpStatus};
pub use synthesis::{encode, synthesize, ObjectiveMode, SynthesisProblem, SynthesisResult};
pub use system::{LtiSystem, TimeDomain};
pub use trajectory::{PiecewisePolynomial, SegmentPolynomial};
pub use verify::{certify, certify_with, exact_simulate, VerificationReport, VerifyOptions};
