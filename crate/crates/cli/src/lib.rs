//! Batch front end for `contract-synth`: reads a JSON run configuration,
//! runs the synthesis pipeline and writes CSV/JSON artifacts.
//!
//! Exit codes:
//!
//! | code | meaning                                   |
//! |------|-------------------------------------------|
//! | 0    | success / the contract is implemented     |
//! | 1    | I/O failure, missing or corrupt artifacts |
//! | 2    | configuration schema error                |
//! | 3    | contract smoothness assumption violated   |
//! | 4    | no interpolating discretization (order)   |
//! | 5    | discrete-time problem infeasible          |
//! | 6    | verification failed                       |

pub mod artifacts;
pub mod commands;
pub mod config;

use contract_synth::Error;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Corrupt(String),
    #[error("{0}")]
    Schema(String),
    #[error(transparent)]
    Pipeline(#[from] Error),
    #[error("verification failed: {0}")]
    VerificationFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) | CliError::Corrupt(_) => 1,
            CliError::Schema(_) => 2,
            CliError::Pipeline(e) => pipeline_exit_code(e),
            CliError::VerificationFailed(_) => 6,
        }
    }

    /// Stable machine-readable name of the failure class.
    pub fn kind(&self) -> &'static str {
        match self.exit_code() {
            1 => "io",
            2 => "schema",
            3 => "assumption_violated",
            4 => "infeasible_order",
            5 => "discrete_infeasible",
            6 => "verification_failed",
            _ => "error",
        }
    }
}

pub fn pipeline_exit_code(e: &Error) -> u8 {
    match e {
        Error::Dimension { .. } | Error::NotSquare { .. } | Error::NonFinite(_) | Error::InvalidContract(_) => 2,
        Error::AssumptionViolated { .. } | Error::SamplingTooCoarse { .. } | Error::EmptyDiscreteSet { .. } => 3,
        Error::InfeasibleOrder { .. } => 4,
        Error::DiscreteInfeasible { .. } | Error::InitialStateOutside { .. } | Error::Unbounded => 5,
        _ => 1,
    }
}
