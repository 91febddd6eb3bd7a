use contract_synth::bernstein::build_bernstein;
use contract_synth::contracts::SmoothnessReport;
use contract_synth::poly_basis::build_basis;
use contract_synth::scenario::{
    robot_initial_state, ROBOT_DEGREE, ROBOT_ELL, ROBOT_HORIZON, ROBOT_INPUT_BOUND, ROBOT_POSITION_BOXES,
    ROBOT_SPEED_BOUND,
};
use contract_synth::verify::certify_trajectory;
use contract_synth::{
    certify_with, smoothness_analysis, synthesize, Error, PiecewisePolynomial, SegmentPolynomial, SynthesisProblem,
    SynthesisResult, VerificationReport, VerifyOptions,
};
use serde::Serialize;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::artifacts::{self, Report, RunInfo, SmoothnessSummary, SynthesisSummary, VerificationSummary};
use crate::config::{
    parse_config, DiscretizationSpec, Labels, ObjectiveSpec, PieceSpec, RunConfig, SetSpec, Setting, SystemSpec,
    ToleranceSpec, SCHEMA_VERSION,
};
use crate::CliError;

pub const DEFAULT_OUT_DIR: &str = "contract-synth-out";
pub const DEMO_OUT_DIR: &str = "demo-out";

pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_config(&text, &path.display().to_string())
}

/// Command-line overrides of configuration values.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub tolerance: Option<f64>,
    pub grid: Option<usize>,
    pub objective: Option<ObjectiveSpec>,
}

impl Overrides {
    fn apply(&self, cfg: &mut RunConfig) -> Result<(), CliError> {
        if let Some(t) = self.tolerance {
            if !(t.is_finite() && t >= 0.0) {
                return Err(CliError::Schema(format!("--tolerance must be a nonnegative number, got {t}")));
            }
            cfg.tolerances.membership = t;
        }
        if let Some(g) = self.grid {
            if g == 0 {
                return Err(CliError::Schema("--grid must be at least 1".into()));
            }
            cfg.tolerances.grid_points_per_segment = g;
        }
        if let Some(o) = self.objective {
            cfg.objective = o;
        }
        Ok(())
    }

    fn out_dir(&self, cfg: &RunConfig, default: &str) -> PathBuf {
        self.out
            .clone()
            .or_else(|| cfg.output_dir.clone())
            .unwrap_or_else(|| PathBuf::from(default))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BreakpointDiagnostics {
    pub time: f64,
    pub backward: f64,
    pub forward: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Analysis {
    pub horizon: f64,
    pub r_c: f64,
    pub terminal_backward: f64,
    pub min_ell: usize,
    pub max_tau: f64,
    pub breakpoints: Vec<BreakpointDiagnostics>,
}

impl Analysis {
    fn new(horizon: f64, s: &SmoothnessReport) -> Self {
        Self {
            horizon,
            r_c: s.r_c,
            terminal_backward: s.terminal_backward,
            min_ell: s.min_ell,
            max_tau: horizon / s.min_ell as f64,
            breakpoints: s
                .breakpoints
                .iter()
                .map(|b| BreakpointDiagnostics {
                    time: b.time,
                    backward: b.backward,
                    forward: b.forward,
                })
                .collect(),
        }
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "horizon T          {}", self.horizon);
        let _ = writeln!(s, "smoothness r_c     {}", self.r_c);
        let _ = writeln!(s, "terminal radius    {}", self.terminal_backward);
        let _ = writeln!(s, "minimum ell_d      {}", self.min_ell);
        let _ = writeln!(s, "largest tau        {}", self.max_tau);
        let _ = writeln!(s, "breakpoints:");
        for b in &self.breakpoints {
            let _ = writeln!(s, "  t = {:<8} backward {:<8} forward {}", b.time, b.backward, b.forward);
        }
        s
    }
}

pub fn analyze(cfg: &RunConfig) -> Result<Analysis, CliError> {
    let contract = cfg.contract()?;
    let s = smoothness_analysis(&contract)?;
    Ok(Analysis::new(contract.horizon(), &s))
}

/// Result of a synthesis run together with its certificate.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub result: SynthesisResult,
    pub verification: VerificationReport,
    pub info: RunInfo,
    pub report: Report,
    pub out_dir: PathBuf,
}

/// Discretizations to try, smallest sampling count and degree first.
fn candidates(d: &DiscretizationSpec, min_ell: usize) -> Vec<(usize, usize)> {
    let ells: Vec<usize> = match d.ell_d.fixed() {
        Some(e) => vec![e],
        None => (min_ell..=min_ell + d.ell_search).collect(),
    };
    let degrees: Vec<usize> = match d.degree.fixed() {
        Some(n) => vec![n],
        None => (1..=d.max_degree).collect(),
    };
    ells.iter().flat_map(|&e| degrees.iter().map(move |&n| (e, n))).collect()
}

/// Runs synthesis and certification without touching the file system.
pub fn run_synthesis(cfg: &RunConfig) -> Result<(SynthesisResult, VerificationReport), CliError> {
    let system = cfg.system()?;
    let contract = cfg.contract()?;
    let x0 = cfg.initial_state();
    let smoothness = smoothness_analysis(&contract)?;

    let mut order_error = None;
    let mut lp_error = None;
    let mut found = None;
    for (ell, degree) in candidates(&cfg.discretization, smoothness.min_ell) {
        let mut problem = SynthesisProblem::new(system.clone(), contract.clone(), x0.clone(), ell, degree);
        problem.objective = cfg.objective.into();
        problem.residual_tol = cfg.tolerances.design_residual;
        match synthesize(&problem) {
            Ok(r) => {
                found = Some(r);
                break;
            }
            Err(e @ Error::InfeasibleOrder { .. }) => order_error = Some(e),
            Err(e @ (Error::DiscreteInfeasible { .. } | Error::InitialStateOutside { .. })) => lp_error = Some(e),
            Err(e) => return Err(e.into()),
        }
    }
    let Some(result) = found else {
        let e = lp_error.or(order_error).expect("at least one candidate was tried");
        return Err(e.into());
    };
    let options = VerifyOptions {
        grid_points_per_segment: cfg.tolerances.grid_points_per_segment,
        tolerance: cfg.tolerances.membership,
    };
    let verification = certify_with(&result, &contract, &system, &x0, options)?;
    Ok((result, verification))
}

fn run_info(cfg: &RunConfig, result: &SynthesisResult) -> RunInfo {
    RunInfo {
        artifact_version: artifacts::ARTIFACT_VERSION,
        ell_d: result.u_d.len() - 1,
        degree: result.u_c.basis().degree(),
        tau: result.tau,
        horizon: cfg.contract.horizon,
        state_dim: cfg.state_dim(),
        input_dim: cfg.input_dim(),
        objective: cfg.objective.as_str().into(),
        tolerance: cfg.tolerances.membership,
        grid_points_per_segment: cfg.tolerances.grid_points_per_segment,
        state_labels: cfg.state_labels(),
        input_labels: cfg.input_labels(),
    }
}

fn build_report(result: &SynthesisResult, info: &RunInfo, v: &VerificationReport) -> Report {
    Report {
        smoothness: SmoothnessSummary {
            r_c: result.smoothness.r_c,
            min_ell: result.smoothness.min_ell,
            terminal_backward: result.smoothness.terminal_backward,
        },
        synthesis: SynthesisSummary {
            ell_d: info.ell_d,
            degree: info.degree,
            tau: result.tau,
            design_residual: result.design_residual,
            objective_value: result.objective_value,
            lp_iterations: result.lp_iterations,
            lp_max_violation: result.lp_max_violation,
            control_point_violation: result.control_point_violation,
            encoding_drift: result.encoding_drift,
        },
        verification: VerificationSummary::from(v),
    }
}

/// `synthesize`: runs the pipeline, writes all artifacts and fails with
/// [`CliError::VerificationFailed`] unless the contract is implemented.
pub fn synthesize_command(cfg: &RunConfig, overrides: &Overrides) -> Result<Outcome, CliError> {
    synthesize_into(cfg, overrides, DEFAULT_OUT_DIR)
}

fn synthesize_into(cfg: &RunConfig, overrides: &Overrides, default_out: &str) -> Result<Outcome, CliError> {
    let mut cfg = cfg.clone();
    overrides.apply(&mut cfg)?;
    let out_dir = overrides.out_dir(&cfg, default_out);
    let (result, verification) = run_synthesis(&cfg)?;
    let info = run_info(&cfg, &result);
    let report = build_report(&result, &info, &verification);
    artifacts::write_all(&out_dir, &result, &cfg.contract()?, &info, &report)?;
    let outcome = Outcome {
        result,
        verification,
        info,
        report,
        out_dir,
    };
    if !outcome.verification.implements {
        return Err(CliError::VerificationFailed(format!(
            "max input violation {:e}, max state violation {:e} (tolerance {:e}); artifacts in {}",
            outcome.verification.max_input_violation,
            outcome.verification.max_state_violation,
            outcome.verification.tolerance,
            outcome.out_dir.display()
        )));
    }
    Ok(outcome)
}

pub fn render_outcome(o: &Outcome) -> String {
    let v = &o.verification;
    let s = &o.report.synthesis;
    let mut out = String::new();
    let _ = writeln!(out, "ell_d = {}, N = {}, tau = {}", s.ell_d, s.degree, s.tau);
    let _ = writeln!(out, "objective          {}", s.objective_value);
    let _ = writeln!(out, "implements         {}", v.implements);
    let _ = writeln!(out, "certified          {}", v.certified);
    let _ = writeln!(out, "max input viol.    {:e}", v.max_input_violation);
    let _ = writeln!(out, "max state viol.    {:e}", v.max_state_violation);
    let _ = writeln!(out, "oracle mismatch    {:e}", v.max_trajectory_mismatch);
    let _ = writeln!(out, "grid               {} points", v.grid_size);
    let _ = writeln!(out, "artifacts          {}", o.out_dir.display());
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyOutcome {
    /// The stored artifacts agree with each other.
    pub consistent: bool,
    pub issues: Vec<String>,
    pub verification: VerificationSummary,
}

impl VerifyOutcome {
    pub fn verdict(&self) -> bool {
        self.consistent && self.verification.implements
    }
}

const CONSISTENCY_TOL: f64 = 1e-9;

/// `verify`: re-certifies saved artifacts against the configuration.
pub fn verify_command(cfg: &RunConfig, results: &Path, overrides: &Overrides) -> Result<VerifyOutcome, CliError> {
    let mut cfg = cfg.clone();
    overrides.apply(&mut cfg)?;
    if !results.is_dir() {
        return Err(CliError::Io(format!("{}: results directory not found", results.display())));
    }
    let info = artifacts::read_run_info(results)?;
    let (n, m) = (cfg.state_dim(), cfg.input_dim());
    if info.state_dim != n || info.input_dim != m {
        return Err(CliError::Corrupt(format!(
            "{}: dimensions ({}, {}) do not match the configuration ({n}, {m})",
            artifacts::RUN_FILE,
            info.state_dim,
            info.input_dim
        )));
    }
    let seq = artifacts::parse_sequences(artifacts::open(results, artifacts::SEQUENCES_FILE)?, n, m)?;
    if seq.u_d.len() != info.ell_d + 1 {
        return Err(CliError::Corrupt(format!(
            "{}: {} rows, expected {}",
            artifacts::SEQUENCES_FILE,
            seq.u_d.len(),
            info.ell_d + 1
        )));
    }
    let seg = artifacts::parse_segments(
        artifacts::open(results, artifacts::SEGMENTS_FILE)?,
        n,
        m,
        info.degree,
        info.ell_d,
    )?;

    let mut issues = Vec::new();
    let nn = info.degree;
    let basis = build_basis(nn, info.tau)?;
    let bern = build_bernstein(&basis)?;
    let mut u_segments = Vec::with_capacity(info.ell_d);
    let mut x_segments = Vec::with_capacity(info.ell_d);
    for k in 0..info.ell_d {
        let u_poly = SegmentPolynomial {
            value_at_0: seq.u_d[k].clone(),
            coeffs: seg.u_nodes[k].columns(1, nn).into_owned(),
        };
        let x_poly = SegmentPolynomial {
            value_at_0: seq.x_d[k].clone(),
            coeffs: seg.x_nodes[k].columns(1, nn).into_owned(),
        };
        for (name, stored, seq_val) in [
            ("u", &seg.u_nodes[k], &seq.u_d[k]),
            ("x", &seg.x_nodes[k], &seq.x_d[k]),
        ] {
            if (stored.column(0) - seq_val).amax() > CONSISTENCY_TOL * (1.0 + seq_val.amax()) {
                issues.push(format!("segment {k}: {name} start value disagrees with {}", artifacts::SEQUENCES_FILE));
            }
        }
        for (name, poly, points) in [("u", &u_poly, &seg.u_points[k]), ("x", &x_poly, &seg.x_points[k])] {
            let recomputed = bern.control_points(&poly.value_at_0, &poly.coeffs)?;
            if (&recomputed - points).amax() > CONSISTENCY_TOL * (1.0 + recomputed.amax()) {
                issues.push(format!("segment {k}: stored {name} control points do not match the node values"));
            }
        }
        u_segments.push(u_poly);
        x_segments.push(x_poly);
    }
    let u_c = PiecewisePolynomial::new(basis.clone(), u_segments)?;
    let x_c = PiecewisePolynomial::new(basis, x_segments)?;
    for k in 0..info.ell_d {
        // Each segment must end where the next sample starts.
        let end = x_c.eval_segment(k, info.tau)?;
        let next = &seq.x_d[k + 1];
        if (&end - next).amax() > CONSISTENCY_TOL * (1.0 + next.amax()) {
            issues.push(format!("segment {k}: state does not reach x_d({})", k + 1));
        }
    }
    let options = VerifyOptions {
        grid_points_per_segment: cfg.tolerances.grid_points_per_segment,
        tolerance: cfg.tolerances.membership,
    };
    let report = certify_trajectory(&cfg.system()?, &cfg.contract()?, &cfg.initial_state(), &u_c, Some(&x_c), options)?;
    if report.max_trajectory_mismatch > contract_synth::verify::MISMATCH_TOL {
        issues.push(format!(
            "stored state departs from the exact response by {:e}",
            report.max_trajectory_mismatch
        ));
    }
    Ok(VerifyOutcome {
        consistent: issues.is_empty(),
        issues,
        verification: VerificationSummary::from(&report),
    })
}

/// Configuration of the built-in planar robot example.
pub fn robot_config() -> RunConfig {
    let v = ROBOT_SPEED_BOUND;
    let f = ROBOT_INPUT_BOUND;
    let mut a = vec![vec![0.0; 4]; 4];
    a[0][2] = 1.0;
    a[1][3] = 1.0;
    let mut b = vec![vec![0.0; 2]; 4];
    b[2][0] = 1.0;
    b[3][1] = 1.0;
    let pieces = ROBOT_POSITION_BOXES
        .iter()
        .enumerate()
        .map(|(j, (lo, hi))| PieceSpec {
            t_start: j as f64,
            t_end: j as f64 + 1.0,
            input: SetSpec::Box {
                lower: vec![-f, -f],
                upper: vec![f, f],
            },
            state: SetSpec::Box {
                lower: vec![lo[0], lo[1], -v, -v],
                upper: vec![hi[0], hi[1], v, v],
            },
        })
        .collect();
    RunConfig {
        schema_version: SCHEMA_VERSION,
        system: SystemSpec { a, b },
        contract: crate::config::ContractSpec {
            horizon: ROBOT_HORIZON,
            pieces,
        },
        x0: robot_initial_state().iter().copied().collect(),
        discretization: DiscretizationSpec {
            ell_d: Setting::Fixed(ROBOT_ELL),
            degree: Setting::Fixed(ROBOT_DEGREE),
            ..DiscretizationSpec::default()
        },
        tolerances: ToleranceSpec::default(),
        objective: ObjectiveSpec::MinL1Input,
        output_dir: None,
        labels: Some(Labels {
            states: ["x", "y", "v_x", "v_y"].map(String::from).to_vec(),
            inputs: ["F_x", "F_y"].map(String::from).to_vec(),
        }),
    }
}

/// `demo`: synthesizes and certifies the built-in robot example.
pub fn demo_command(overrides: &Overrides) -> Result<Outcome, CliError> {
    synthesize_into(&robot_config(), overrides, DEMO_OUT_DIR)
}
