//! Run configuration: a versioned JSON document describing the system, the
//! contract, the initial state and the discretization.

use contract_synth::{ContractPiece, HPolytope, LtiSystem, Matrix, ObjectiveMode, PiecewiseContract, Vector};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub system: SystemSpec,
    pub contract: ContractSpec,
    pub x0: Vec<f64>,
    #[serde(default)]
    pub discretization: DiscretizationSpec,
    #[serde(default)]
    pub tolerances: ToleranceSpec,
    #[serde(default)]
    pub objective: ObjectiveSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Labels>,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    #[serde(rename = "B")]
    pub b: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ContractSpec {
    pub horizon: f64,
    pub pieces: Vec<PieceSpec>,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct PieceSpec {
    pub t_start: f64,
    pub t_end: f64,
    pub input: SetSpec,
    pub state: SetSpec,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SetSpec {
    Box { lower: Vec<f64>, upper: Vec<f64> },
    Polytope { h_matrix: Vec<Vec<f64>>, h_vector: Vec<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Auto {
    Auto,
}

/// A positive integer or the keyword `"auto"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(untagged)]
pub enum Setting {
    Fixed(usize),
    Search(Auto),
}

impl Default for Setting {
    fn default() -> Self {
        Setting::Search(Auto::Auto)
    }
}

impl Setting {
    pub fn fixed(&self) -> Option<usize> {
        match self {
            Setting::Fixed(v) => Some(*v),
            Setting::Search(_) => None,
        }
    }
}

pub const DEFAULT_MAX_DEGREE: usize = 10;
pub const DEFAULT_ELL_SEARCH: usize = 16;

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct DiscretizationSpec {
    #[serde(default)]
    pub ell_d: Setting,
    #[serde(default, rename = "N")]
    pub degree: Setting,
    /// Largest degree tried by the search.
    #[serde(default = "default_max_degree")]
    pub max_degree: usize,
    /// Number of sampling choices tried above the minimum.
    #[serde(default = "default_ell_search")]
    pub ell_search: usize,
}

fn default_max_degree() -> usize {
    DEFAULT_MAX_DEGREE
}

fn default_ell_search() -> usize {
    DEFAULT_ELL_SEARCH
}

impl Default for DiscretizationSpec {
    fn default() -> Self {
        Self {
            ell_d: Setting::default(),
            degree: Setting::default(),
            max_degree: DEFAULT_MAX_DEGREE,
            ell_search: DEFAULT_ELL_SEARCH,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceSpec {
    #[serde(default = "default_membership")]
    pub membership: f64,
    #[serde(default = "default_grid")]
    pub grid_points_per_segment: usize,
    #[serde(default = "default_design_residual")]
    pub design_residual: f64,
}

fn default_membership() -> f64 {
    contract_synth::verify::DEFAULT_MEMBERSHIP_TOL
}

fn default_grid() -> usize {
    contract_synth::verify::DEFAULT_GRID_POINTS
}

fn default_design_residual() -> f64 {
    contract_synth::interpolation::DEFAULT_RESIDUAL_TOL
}

impl Default for ToleranceSpec {
    fn default() -> Self {
        Self {
            membership: default_membership(),
            grid_points_per_segment: default_grid(),
            design_residual: default_design_residual(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveSpec {
    #[default]
    MinL1Input,
    FeasibilityOnly,
}

impl From<ObjectiveSpec> for ObjectiveMode {
    fn from(o: ObjectiveSpec) -> Self {
        match o {
            ObjectiveSpec::MinL1Input => ObjectiveMode::MinL1Input,
            ObjectiveSpec::FeasibilityOnly => ObjectiveMode::FeasibilityOnly,
        }
    }
}

impl ObjectiveSpec {
    pub fn as_str(&self) -> &'static str {
        match self {
            ObjectiveSpec::MinL1Input => "min_l1_input",
            ObjectiveSpec::FeasibilityOnly => "feasibility_only",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Labels {
    #[serde(default)]
    pub states: Vec<String>,
    #[serde(default)]
    pub inputs: Vec<String>,
}

/// Parses and validates a configuration document. `source` names the
/// document in error messages.
pub fn parse_config(text: &str, source: &str) -> Result<RunConfig, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        CliError::Schema(format!(
            "{source}: line {} column {}: at `{path}`: {inner}",
            inner.line(),
            inner.column()
        ))
    })?;
    cfg.validate().map_err(|msg| CliError::Schema(format!("{source}: {msg}")))?;
    Ok(cfg)
}

fn matrix_from_rows(rows: &[Vec<f64>], field: &str) -> Result<Matrix, String> {
    let r = rows.len();
    let c = rows.first().map_or(0, |row| row.len());
    if let Some((i, row)) = rows.iter().enumerate().find(|(_, row)| row.len() != c) {
        return Err(format!("{field}[{i}] has {} entries, expected {c}", row.len()));
    }
    Ok(Matrix::from_fn(r, c, |i, j| rows[i][j]))
}

fn check_finite(values: &[f64], field: &str) -> Result<(), String> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(format!("{field}[{i}] is not finite")),
        None => Ok(()),
    }
}

impl SetSpec {
    pub fn dim(&self) -> usize {
        match self {
            SetSpec::Box { lower, .. } => lower.len(),
            SetSpec::Polytope { h_matrix, .. } => h_matrix.first().map_or(0, |r| r.len()),
        }
    }

    fn validate(&self, field: &str, dim: usize) -> Result<(), String> {
        match self {
            SetSpec::Box { lower, upper } => {
                if lower.len() != dim || upper.len() != dim {
                    return Err(format!(
                        "{field}.box: expected {dim} bounds, found lower {} / upper {}",
                        lower.len(),
                        upper.len()
                    ));
                }
                if let Some(i) = (0..dim).find(|&i| lower[i] > upper[i] || lower[i].is_nan() || upper[i].is_nan()) {
                    return Err(format!("{field}.box: lower[{i}] > upper[{i}]"));
                }
            }
            SetSpec::Polytope { h_matrix, h_vector } => {
                if h_matrix.is_empty() {
                    return Err(format!("{field}.polytope: h_matrix has no rows"));
                }
                if h_matrix.len() != h_vector.len() {
                    return Err(format!(
                        "{field}.polytope: {} rows but {} right-hand sides",
                        h_matrix.len(),
                        h_vector.len()
                    ));
                }
                let m = matrix_from_rows(h_matrix, &format!("{field}.polytope.h_matrix"))?;
                if m.ncols() != dim {
                    return Err(format!("{field}.polytope: expected {dim} columns, found {}", m.ncols()));
                }
                check_finite(m.as_slice(), &format!("{field}.polytope.h_matrix"))?;
                check_finite(h_vector, &format!("{field}.polytope.h_vector"))?;
            }
        }
        Ok(())
    }

    pub fn to_polytope(&self) -> contract_synth::Result<HPolytope> {
        match self {
            SetSpec::Box { lower, upper } => HPolytope::from_box(lower, upper),
            SetSpec::Polytope { h_matrix, h_vector } => {
                let c = h_matrix.first().map_or(0, |r| r.len());
                let m = Matrix::from_fn(h_matrix.len(), c, |i, j| h_matrix[i][j]);
                HPolytope::new(m, Vector::from_vec(h_vector.clone()))
            }
        }
    }
}

impl RunConfig {
    /// Structural checks beyond what the JSON types enforce.
    pub fn validate(&self) -> Result<(), String> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            ));
        }
        let a = matrix_from_rows(&self.system.a, "system.A")?;
        let b = matrix_from_rows(&self.system.b, "system.B")?;
        let n = a.nrows();
        if n == 0 || a.ncols() != n {
            return Err(format!("system.A must be square and nonempty, found {}x{}", a.nrows(), a.ncols()));
        }
        if b.nrows() != n || b.ncols() == 0 {
            return Err(format!("system.B must be {n}xm with m >= 1, found {}x{}", b.nrows(), b.ncols()));
        }
        check_finite(a.as_slice(), "system.A")?;
        check_finite(b.as_slice(), "system.B")?;
        let m = b.ncols();
        if self.x0.len() != n {
            return Err(format!("x0 has {} entries, expected {n}", self.x0.len()));
        }
        check_finite(&self.x0, "x0")?;
        let horizon = self.contract.horizon;
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(format!("contract.horizon must be positive, found {horizon}"));
        }
        if self.contract.pieces.is_empty() {
            return Err("contract.pieces is empty".into());
        }
        for (i, p) in self.contract.pieces.iter().enumerate() {
            if !(p.t_start.is_finite() && p.t_end.is_finite() && p.t_start < p.t_end) {
                return Err(format!("contract.pieces[{i}]: need t_start < t_end"));
            }
            p.input.validate(&format!("contract.pieces[{i}].input"), m)?;
            p.state.validate(&format!("contract.pieces[{i}].state"), n)?;
        }
        let d = &self.discretization;
        if d.ell_d.fixed() == Some(0) {
            return Err("discretization.ell_d must be at least 1".into());
        }
        if matches!(d.degree.fixed(), Some(0)) || d.degree.fixed().is_some_and(|v| v > 20) {
            return Err("discretization.N must lie in 1..=20".into());
        }
        if d.max_degree == 0 || d.max_degree > 20 {
            return Err("discretization.max_degree must lie in 1..=20".into());
        }
        let t = &self.tolerances;
        if !(t.membership.is_finite() && t.membership >= 0.0) {
            return Err("tolerances.membership must be a nonnegative number".into());
        }
        if !(t.design_residual.is_finite() && t.design_residual > 0.0) {
            return Err("tolerances.design_residual must be positive".into());
        }
        if t.grid_points_per_segment == 0 {
            return Err("tolerances.grid_points_per_segment must be at least 1".into());
        }
        if let Some(l) = &self.labels {
            if !l.states.is_empty() && l.states.len() != n {
                return Err(format!("labels.states has {} names, expected {n}", l.states.len()));
            }
            if !l.inputs.is_empty() && l.inputs.len() != m {
                return Err(format!("labels.inputs has {} names, expected {m}", l.inputs.len()));
            }
        }
        Ok(())
    }

    pub fn system(&self) -> contract_synth::Result<LtiSystem> {
        let a = Matrix::from_fn(self.system.a.len(), self.system.a.len(), |i, j| self.system.a[i][j]);
        let m = self.system.b.first().map_or(0, |r| r.len());
        let b = Matrix::from_fn(self.system.b.len(), m, |i, j| self.system.b[i][j]);
        LtiSystem::continuous(a, b)
    }

    pub fn contract(&self) -> contract_synth::Result<PiecewiseContract> {
        let pieces = self
            .contract
            .pieces
            .iter()
            .map(|p| {
                Ok(ContractPiece {
                    t_start: p.t_start,
                    t_end: p.t_end,
                    input_set: p.input.to_polytope()?,
                    state_set: p.state.to_polytope()?,
                })
            })
            .collect::<contract_synth::Result<Vec<_>>>()?;
        PiecewiseContract::new(self.contract.horizon, pieces)
    }

    pub fn initial_state(&self) -> Vector {
        Vector::from_vec(self.x0.clone())
    }

    pub fn state_dim(&self) -> usize {
        self.system.a.len()
    }

    pub fn input_dim(&self) -> usize {
        self.system.b.first().map_or(0, |r| r.len())
    }

    pub fn state_labels(&self) -> Vec<String> {
        match &self.labels {
            Some(l) if !l.states.is_empty() => l.states.clone(),
            _ => (0..self.state_dim()).map(|i| format!("x_{i}")).collect(),
        }
    }

    pub fn input_labels(&self) -> Vec<String> {
        match &self.labels {
            Some(l) if !l.inputs.is_empty() => l.inputs.clone(),
            _ => (0..self.input_dim()).map(|i| format!("u_{i}")).collect(),
        }
    }
}
