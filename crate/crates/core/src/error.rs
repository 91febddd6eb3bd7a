use thiserror::Error;

/// Errors raised anywhere in the synthesis pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    Dimension {
        context: &'static str,
        expected: String,
        found: String,
    },

    #[error("{context} requires a square matrix, got {rows}x{cols}")]
    NotSquare {
        context: &'static str,
        rows: usize,
        cols: usize,
    },

    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),

    #[error("{name} = {value} lies outside the admissible range [{lower}, {upper}]")]
    OutOfDomain {
        name: &'static str,
        value: f64,
        lower: f64,
        upper: f64,
    },

    #[error("polynomial degree {0} is outside the supported range 1..=20")]
    UnsupportedDegree(usize),

    #[error("collocation node search did not converge (max residual {residual:e})")]
    RootFinding { residual: f64 },

    #[error("Bernstein conversion matrix is numerically singular (condition estimate {condition:e})")]
    SingularBernstein { condition: f64 },

    #[error("invalid contract: {0}")]
    InvalidContract(String),

    #[error("contract smoothness assumption violated at t = {time}: {detail}")]
    AssumptionViolated { time: f64, detail: String },

    #[error("ell_d = {requested} is below the minimum admissible value {minimum}")]
    SamplingTooCoarse { requested: usize, minimum: usize },

    #[error("discretized {which} set at k = {k} is empty")]
    EmptyDiscreteSet { which: &'static str, k: usize },

    #[error(
        "no interpolating discrete-time system exists for degree N = {degree} \
         (relative residual {residual:e}); increase N"
    )]
    InfeasibleOrder { degree: usize, residual: f64 },

    #[error("segment solve residual {residual:e} exceeds tolerance; interpolator precondition is broken")]
    SegmentResidual { residual: f64 },

    #[error(
        "discrete-time contract implementation is infeasible (phase-1 infeasibility {certificate:e}); \
         smaller sampling times or lower degrees N improve feasibility. Violated constraint groups: {violated:?}"
    )]
    DiscreteInfeasible {
        certificate: f64,
        violated: Vec<String>,
    },

    #[error("synthesis linear program is unbounded")]
    Unbounded,

    #[error("initial state is outside the discretized guarantee set at k = 0 (violation {violation:e})")]
    InitialStateOutside { violation: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn dim_err(context: &'static str, expected: impl ToString, found: impl ToString) -> Error {
    Error::Dimension {
        context,
        expected: expected.to_string(),
        found: found.to_string(),
    }
}
