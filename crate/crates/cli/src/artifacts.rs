//! On-disk artifacts of a synthesis run.
//!
//! | file                  | content                                              |
//! |-----------------------|------------------------------------------------------|
//! | `discrete_system.csv` | `matrix,row,col,value` for `A_d` and `B_d`           |
//! | `sequences.csv`       | `k,t`, inputs, states of the discrete trajectory     |
//! | `segments.csv`        | node values and Bernstein control points per segment |
//! | `trajectory.csv`      | sampled `x_c`, `u_c` and the active contract bounds  |
//! | `report.json`         | verification report and pipeline diagnostics         |
//! | `run.json`            | discretization metadata needed by `verify`           |
//!
//! Floats are written with 17 significant digits so they parse back to the
//! same bits.

use contract_synth::{Matrix, PiecewiseContract, PiecewisePolynomial, SynthesisResult, VerificationReport, Vector};
use serde::{Deserialize, Serialize};
use std::fs;
use std::io::Read;
use std::path::Path;

use crate::CliError;

pub const DISCRETE_SYSTEM_FILE: &str = "discrete_system.csv";
pub const SEQUENCES_FILE: &str = "sequences.csv";
pub const SEGMENTS_FILE: &str = "segments.csv";
pub const TRAJECTORY_FILE: &str = "trajectory.csv";
pub const REPORT_FILE: &str = "report.json";
pub const RUN_FILE: &str = "run.json";

pub const ARTIFACT_VERSION: u32 = 1;

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn parse_f64(field: &str, file: &str, line: u64) -> Result<f64, CliError> {
    field
        .trim()
        .parse::<f64>()
        .map_err(|_| CliError::Corrupt(format!("{file}: line {line}: `{field}` is not a number")))
}

fn parse_usize(field: &str, file: &str, line: u64) -> Result<usize, CliError> {
    field
        .trim()
        .parse::<usize>()
        .map_err(|_| CliError::Corrupt(format!("{file}: line {line}: `{field}` is not an index")))
}

fn csv_err(file: &str, e: csv::Error) -> CliError {
    CliError::Corrupt(format!("{file}: {e}"))
}

/// Metadata of a run; enough to rebuild the polynomial signals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunInfo {
    pub artifact_version: u32,
    pub ell_d: usize,
    pub degree: usize,
    pub tau: f64,
    pub horizon: f64,
    pub state_dim: usize,
    pub input_dim: usize,
    pub objective: String,
    pub tolerance: f64,
    pub grid_points_per_segment: usize,
    pub state_labels: Vec<String>,
    pub input_labels: Vec<String>,
}

impl RunInfo {
    pub fn check(&self) -> Result<(), CliError> {
        if self.artifact_version != ARTIFACT_VERSION {
            return Err(CliError::Corrupt(format!(
                "{RUN_FILE}: artifact_version {} is not supported",
                self.artifact_version
            )));
        }
        if self.ell_d == 0 || self.degree == 0 || self.degree > 20 || self.state_dim == 0 || self.input_dim == 0 {
            return Err(CliError::Corrupt(format!("{RUN_FILE}: invalid dimensions")));
        }
        if !(self.tau.is_finite() && self.tau > 0.0) {
            return Err(CliError::Corrupt(format!("{RUN_FILE}: invalid tau")));
        }
        if self.state_labels.len() != self.state_dim || self.input_labels.len() != self.input_dim {
            return Err(CliError::Corrupt(format!("{RUN_FILE}: label count does not match dimensions")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SmoothnessSummary {
    pub r_c: f64,
    pub min_ell: usize,
    pub terminal_backward: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationSummary {
    pub implements: bool,
    pub certified: bool,
    pub max_input_violation: f64,
    pub max_state_violation: f64,
    pub max_trajectory_mismatch: f64,
    pub max_control_point_violation: f64,
    pub worst_time: f64,
    pub grid_points_per_segment: usize,
    pub grid_size: usize,
    pub tolerance: f64,
}

impl From<&VerificationReport> for VerificationSummary {
    fn from(r: &VerificationReport) -> Self {
        Self {
            implements: r.implements,
            certified: r.certified,
            max_input_violation: r.max_input_violation,
            max_state_violation: r.max_state_violation,
            max_trajectory_mismatch: r.max_trajectory_mismatch,
            max_control_point_violation: r.max_control_point_violation,
            worst_time: r.worst_time,
            grid_points_per_segment: r.grid_points_per_segment,
            grid_size: r.grid_size,
            tolerance: r.tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SynthesisSummary {
    pub ell_d: usize,
    pub degree: usize,
    pub tau: f64,
    pub design_residual: f64,
    pub objective_value: f64,
    pub lp_iterations: usize,
    pub lp_max_violation: f64,
    pub control_point_violation: f64,
    pub encoding_drift: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub smoothness: SmoothnessSummary,
    pub synthesis: SynthesisSummary,
    pub verification: VerificationSummary,
}

fn write_file(dir: &Path, name: &str, bytes: &[u8]) -> Result<(), CliError> {
    let path = dir.join(name);
    fs::write(&path, bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn to_csv(rows: Vec<Vec<String>>) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.write_record(&r).map_err(|e| CliError::Io(e.to_string()))?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.to_string()))
}

pub fn discrete_system_csv(result: &SynthesisResult) -> Result<Vec<u8>, CliError> {
    let mut rows = vec![vec!["matrix".into(), "row".into(), "col".into(), "value".into()]];
    for (name, m) in [("A_d", result.discrete_system.a()), ("B_d", result.discrete_system.b())] {
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                rows.push(vec![name.into(), i.to_string(), j.to_string(), fmt_f64(m[(i, j)])]);
            }
        }
    }
    to_csv(rows)
}

pub fn sequences_csv(result: &SynthesisResult, info: &RunInfo) -> Result<Vec<u8>, CliError> {
    let mut header = vec!["k".to_string(), "t".to_string()];
    header.extend(info.input_labels.iter().cloned());
    header.extend(info.state_labels.iter().cloned());
    let mut rows = vec![header];
    for k in 0..=info.ell_d {
        let mut row = vec![k.to_string(), fmt_f64(k as f64 * result.tau)];
        row.extend(result.u_d[k].iter().map(|v| fmt_f64(*v)));
        row.extend(result.x_d[k].iter().map(|v| fmt_f64(*v)));
        rows.push(row);
    }
    to_csv(rows)
}

pub fn segments_csv(result: &SynthesisResult) -> Result<Vec<u8>, CliError> {
    let mut rows = vec![["segment", "signal", "component", "index", "node_value", "control_point"]
        .iter()
        .map(|s| s.to_string())
        .collect::<Vec<_>>()];
    for seg in &result.segments {
        let k = seg.k;
        let u_nodes = result.u_c.segments()[k].node_values();
        let x_nodes = result.x_c.segments()[k].node_values();
        for (signal, nodes, points) in [
            ("u", &u_nodes, &result.control_points_u[k]),
            ("x", &x_nodes, &result.control_points_x[k]),
        ] {
            for i in 0..nodes.nrows() {
                for j in 0..nodes.ncols() {
                    rows.push(vec![
                        k.to_string(),
                        signal.into(),
                        i.to_string(),
                        j.to_string(),
                        fmt_f64(nodes[(i, j)]),
                        fmt_f64(points[(i, j)]),
                    ]);
                }
            }
        }
    }
    to_csv(rows)
}

/// Sample times: `points_per_segment` uniform steps per segment plus the end.
pub fn sample_times(tau: f64, ell: usize, points_per_segment: usize) -> Vec<f64> {
    let steps = ell * points_per_segment.max(1);
    let h = tau * ell as f64 / steps as f64;
    (0..=steps).map(|i| i as f64 * h).collect()
}

pub fn trajectory_csv(
    u_c: &PiecewisePolynomial,
    x_c: &PiecewisePolynomial,
    contract: &PiecewiseContract,
    info: &RunInfo,
) -> Result<Vec<u8>, CliError> {
    let mut header = vec!["t".to_string()];
    header.extend(info.state_labels.iter().cloned());
    header.extend(info.input_labels.iter().cloned());
    for l in info.state_labels.iter().chain(&info.input_labels) {
        header.push(format!("{l}_lower"));
        header.push(format!("{l}_upper"));
    }
    let boxes: Vec<_> = contract
        .pieces()
        .iter()
        .map(|p| (p.state_set.bounding_box(), p.input_set.bounding_box()))
        .collect();
    let mut rows = vec![header];
    let times = sample_times(info.tau, info.ell_d, info.grid_points_per_segment);
    for &t in &times {
        let x = x_c.eval(t).map_err(CliError::Pipeline)?;
        let u = u_c.eval(t).map_err(CliError::Pipeline)?;
        let mut row = vec![fmt_f64(t)];
        row.extend(x.iter().map(|v| fmt_f64(*v)));
        row.extend(u.iter().map(|v| fmt_f64(*v)));
        let (sb, ib) = &boxes[contract.piece_at(t)];
        for (bb, d) in [(sb, info.state_dim), (ib, info.input_dim)] {
            for i in 0..d {
                match bb {
                    Some((lo, hi)) => {
                        row.push(fmt_f64(lo[i]));
                        row.push(fmt_f64(hi[i]));
                    }
                    None => {
                        row.push(String::new());
                        row.push(String::new());
                    }
                }
            }
        }
        rows.push(row);
    }
    to_csv(rows)
}

pub fn to_json<T: Serialize>(value: &T) -> Result<Vec<u8>, CliError> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// Writes every artifact of a successful synthesis into `dir`.
pub fn write_all(
    dir: &Path,
    result: &SynthesisResult,
    contract: &PiecewiseContract,
    info: &RunInfo,
    report: &Report,
) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    write_file(dir, DISCRETE_SYSTEM_FILE, &discrete_system_csv(result)?)?;
    write_file(dir, SEQUENCES_FILE, &sequences_csv(result, info)?)?;
    write_file(dir, SEGMENTS_FILE, &segments_csv(result)?)?;
    write_file(dir, TRAJECTORY_FILE, &trajectory_csv(&result.u_c, &result.x_c, contract, info)?)?;
    write_file(dir, REPORT_FILE, &to_json(report)?)?;
    write_file(dir, RUN_FILE, &to_json(info)?)?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sequences {
    pub u_d: Vec<Vector>,
    pub x_d: Vec<Vector>,
}

/// Reads `sequences.csv` for a system with `n` states and `m` inputs.
pub fn parse_sequences(reader: impl Read, n: usize, m: usize) -> Result<Sequences, CliError> {
    let file = SEQUENCES_FILE;
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let width = 2 + m + n;
    let headers = rdr.headers().map_err(|e| csv_err(file, e))?.clone();
    if headers.len() != width || &headers[0] != "k" || &headers[1] != "t" {
        return Err(CliError::Corrupt(format!(
            "{file}: expected header `k,t` plus {m} input and {n} state columns"
        )));
    }
    let mut u_d = Vec::new();
    let mut x_d = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_err(file, e))?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != width {
            return Err(CliError::Corrupt(format!("{file}: line {line}: expected {width} fields")));
        }
        let k = parse_usize(&rec[0], file, line)?;
        if k != u_d.len() {
            return Err(CliError::Corrupt(format!("{file}: line {line}: expected k = {}", u_d.len())));
        }
        parse_f64(&rec[1], file, line)?;
        let mut vals = Vec::with_capacity(m + n);
        for f in rec.iter().skip(2) {
            vals.push(parse_f64(f, file, line)?);
        }
        u_d.push(Vector::from_column_slice(&vals[..m]));
        x_d.push(Vector::from_column_slice(&vals[m..]));
    }
    if u_d.len() < 2 {
        return Err(CliError::Corrupt(format!("{file}: need at least two samples")));
    }
    Ok(Sequences { u_d, x_d })
}

/// Node values and control points of every segment: `u` blocks are
/// `m x (N+1)`, `x` blocks `n x (N+1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentTable {
    pub u_nodes: Vec<Matrix>,
    pub x_nodes: Vec<Matrix>,
    pub u_points: Vec<Matrix>,
    pub x_points: Vec<Matrix>,
}

#[derive(Debug, Deserialize)]
struct SegmentRow {
    segment: usize,
    signal: String,
    component: usize,
    index: usize,
    node_value: f64,
    control_point: f64,
}

/// Reads `segments.csv`; every `(segment, signal, component, index)` cell
/// must appear exactly once.
pub fn parse_segments(reader: impl Read, n: usize, m: usize, degree: usize, ell: usize) -> Result<SegmentTable, CliError> {
    let file = SEGMENTS_FILE;
    let blank = |d: usize| vec![Matrix::from_element(d, degree + 1, f64::NAN); ell];
    let mut t = SegmentTable {
        u_nodes: blank(m),
        x_nodes: blank(n),
        u_points: blank(m),
        x_points: blank(n),
    };
    let mut seen = vec![false; ell * (m + n) * (degree + 1)];
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    for rec in rdr.deserialize::<SegmentRow>() {
        let row = rec.map_err(|e| csv_err(file, e))?;
        let (nodes, points, dim, offset) = match row.signal.as_str() {
            "u" => (&mut t.u_nodes, &mut t.u_points, m, 0),
            "x" => (&mut t.x_nodes, &mut t.x_points, n, m),
            other => return Err(CliError::Corrupt(format!("{file}: unknown signal `{other}`"))),
        };
        if row.segment >= ell || row.component >= dim || row.index > degree {
            return Err(CliError::Corrupt(format!(
                "{file}: cell ({}, {}, {}, {}) is out of range",
                row.segment, row.signal, row.component, row.index
            )));
        }
        let slot = (row.segment * (m + n) + offset + row.component) * (degree + 1) + row.index;
        if std::mem::replace(&mut seen[slot], true) {
            return Err(CliError::Corrupt(format!(
                "{file}: duplicate cell ({}, {}, {}, {})",
                row.segment, row.signal, row.component, row.index
            )));
        }
        nodes[row.segment][(row.component, row.index)] = row.node_value;
        points[row.segment][(row.component, row.index)] = row.control_point;
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        let per_seg = (m + n) * (degree + 1);
        return Err(CliError::Corrupt(format!(
            "{file}: {} cells missing (first in segment {})",
            seen.iter().filter(|s| !**s).count(),
            missing / per_seg
        )));
    }
    Ok(t)
}

pub fn read_run_info(dir: &Path) -> Result<RunInfo, CliError> {
    let path = dir.join(RUN_FILE);
    let text = fs::read_to_string(&path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let info: RunInfo =
        serde_json::from_str(&text).map_err(|e| CliError::Corrupt(format!("{}: {e}", path.display())))?;
    info.check()?;
    Ok(info)
}

pub fn open(dir: &Path, name: &str) -> Result<fs::File, CliError> {
    let path = dir.join(name);
    fs::File::open(&path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_bitwise() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE, 0.0, -0.0] {
            let s = fmt_f64(v);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), v.to_bits(), "{s}");
        }
        assert_eq!(fmt_f64(1.0), "1.0000000000000000e0");
    }

    #[test]
    fn sequences_parse() {
        let text = "k,t,u,x,y\n0,0,1.5,2,3\n1,1,-1,4e-1,5\n";
        let s = parse_sequences(text.as_bytes(), 2, 1).unwrap();
        assert_eq!(s.u_d.len(), 2);
        assert_eq!(s.x_d[1].as_slice(), &[0.4, 5.0]);
    }

    #[test]
    fn sequences_reject_garbage() {
        assert!(parse_sequences("k,t,u\n0,0,zz\n1,1,1\n".as_bytes(), 0, 1).is_err());
        assert!(parse_sequences("k,t,u\n0,0,1\n2,1,1\n".as_bytes(), 0, 1).is_err());
        assert!(parse_sequences("k,t\n".as_bytes(), 0, 1).is_err());
        assert!(parse_sequences("k,t,u\n0,0,1\n".as_bytes(), 0, 1).is_err());
        assert!(parse_sequences("".as_bytes(), 1, 1).is_err());
    }

    #[test]
    fn segments_parse_and_detect_gaps() {
        let mut text = String::from("segment,signal,component,index,node_value,control_point\n");
        for sig in ["u", "x"] {
            for j in 0..2 {
                text.push_str(&format!("0,{sig},0,{j},{j}.5,{j}.25\n"));
            }
        }
        let t = parse_segments(text.as_bytes(), 1, 1, 1, 1).unwrap();
        assert_eq!(t.u_nodes[0][(0, 1)], 1.5);
        assert_eq!(t.x_points[0][(0, 0)], 0.25);

        let dup = format!("{text}0,u,0,1,2,2\n");
        assert!(parse_segments(dup.as_bytes(), 1, 1, 1, 1).is_err());
        let short: String = text.lines().take(4).collect::<Vec<_>>().join("\n");
        assert!(parse_segments(short.as_bytes(), 1, 1, 1, 1).is_err());
        let bad = text.replace("0,x,0,1", "0,z,0,1");
        assert!(parse_segments(bad.as_bytes(), 1, 1, 1, 1).is_err());
        let oob = text.replace("0,x,0,1", "0,x,3,1");
        assert!(parse_segments(oob.as_bytes(), 1, 1, 1, 1).is_err());
    }

    #[test]
    fn sample_times_cover_the_horizon() {
        let t = sample_times(0.5, 3, 4);
        assert_eq!(t.len(), 13);
        assert_eq!(t[0], 0.0);
        assert!((t[12] - 1.5).abs() < 1e-15);
    }
}
