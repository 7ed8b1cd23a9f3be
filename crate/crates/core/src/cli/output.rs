use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::RunManifest;
use crate::airy::constant_ca;
use crate::diagnostics::energy_identity_with;
use crate::discrete::SpaceTimeField;
use crate::fractional::gamma_function;
use crate::scenarios::Scenario;
use crate::solver::{BoundaryProblem, RunReport};
use crate::{Error, Result};

/// Constants used by the run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    pub c_a: f64,
    pub gamma_two_thirds: f64,
}

/// Why a run stopped without a solution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub message: String,
    pub window_start: Option<f64>,
    pub residual_history: Vec<f64>,
}

/// Contents of `metadata.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub program: String,
    pub version: String,
    pub manifest: RunManifest,
    pub scenario: Scenario,
    pub constants: Constants,
    pub converged: bool,
    pub picard_iters: Vec<usize>,
    pub picard_history: Vec<Vec<f64>>,
    pub window_starts: Vec<f64>,
    pub max_boundary_error: Option<f64>,
    pub initial_error: Option<f64>,
    pub warnings: Vec<String>,
    pub failure: Option<Failure>,
    pub files: Vec<String>,
}

fn io_error(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::InvalidArgument(format!("{}: {e}", path.display()))
}

fn write_file(dir: &Path, name: &str, text: &str) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, text).map_err(|e| io_error(&path, e))
}

fn snapshot_rows(nt: usize, count: usize) -> Vec<usize> {
    if count == 1 || nt == 1 {
        return vec![nt - 1];
    }
    let mut rows: Vec<usize> = (0..count)
        .map(|j| ((j as f64) * (nt - 1) as f64 / (count - 1) as f64).round() as usize)
        .collect();
    rows.dedup();
    rows
}

fn field_text(u: &SpaceTimeField, count: usize) -> String {
    let mut text = String::from("# t\tx\tu\n");
    for (b, n) in snapshot_rows(u.tgrid().len(), count).into_iter().enumerate() {
        if b > 0 {
            text.push('\n');
        }
        let t = u.tgrid().node(n);
        for i in 0..u.xgrid().len() {
            let _ = writeln!(text, "{t:.16e}\t{:.16e}\t{:.16e}", u.xgrid().node(i), u.at(n, i).re);
        }
    }
    text
}

fn table(header: &str, columns: &[&[f64]]) -> String {
    let mut text = format!("# {header}\n");
    for n in 0..columns[0].len() {
        let line: Vec<String> = columns.iter().map(|c| format!("{:.16e}", c[n])).collect();
        text.push_str(&line.join("\t"));
        text.push('\n');
    }
    text
}

/// Writes the run directory: `metadata.json` always, and on success the
/// field snapshots and diagnostic series selected by the manifest.
pub fn write_run(
    dir: &Path,
    manifest: &RunManifest,
    scenario: &Scenario,
    problem: &BoundaryProblem,
    outcome: std::result::Result<&(SpaceTimeField, RunReport), &Error>,
) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    let emit = manifest.emit();
    let mut files = Vec::new();
    let mut meta = Metadata {
        program: "halfline-kdv".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        manifest: manifest.clone(),
        scenario: scenario.clone(),
        constants: Constants {
            c_a: constant_ca(),
            gamma_two_thirds: gamma_function(2.0 / 3.0)?,
        },
        converged: false,
        picard_iters: Vec::new(),
        picard_history: Vec::new(),
        window_starts: Vec::new(),
        max_boundary_error: None,
        initial_error: None,
        warnings: problem.config.warnings(),
        failure: None,
        files: Vec::new(),
    };
    match outcome {
        Ok((u, report)) => {
            let times = report.times.as_slice();
            if emit.field {
                write_file(dir, "field.tsv", &field_text(u, manifest.snapshots()?))?;
                files.push("field.tsv".to_string());
            }
            if emit.boundary {
                let trace: Vec<f64> = u.column(0).iter().map(|v| v.re).collect();
                let f = problem.f.real_parts();
                write_file(
                    dir,
                    "boundary.tsv",
                    &table("t\tu(0,t)\tf(t)\t|u(0,t)-f(t)|", &[times, &trace, &f, &report.boundary_error]),
                )?;
                files.push("boundary.tsv".to_string());
            }
            if emit.mass {
                write_file(dir, "mass.tsv", &table("t\tmass", &[times, &report.mass]))?;
                files.push("mass.tsv".to_string());
            }
            if emit.ledger {
                let c = &problem.config;
                let ledger = energy_identity_with(u, &problem.f, &problem.phi, c.k, c.nonlinearity)?;
                write_file(
                    dir,
                    "ledger.tsv",
                    &table("t\tlhs\trhs\timbalance", &[times, &ledger.lhs, &ledger.rhs, &ledger.relative_imbalance]),
                )?;
                files.push("ledger.tsv".to_string());
            }
            meta.converged = report.converged;
            meta.picard_iters = report.picard_iters.clone();
            meta.picard_history = report.picard_history.clone();
            meta.window_starts = report.window_starts.clone();
            meta.max_boundary_error = Some(report.max_boundary_error());
            meta.initial_error = Some(report.initial_error);
            meta.warnings = report.warnings.clone();
        }
        Err(e) => {
            let (window_start, history) = match e {
                Error::NonConvergence { window_start, history, .. } => (Some(*window_start), history.clone()),
                _ => (None, Vec::new()),
            };
            meta.failure = Some(Failure {
                message: e.to_string(),
                window_start,
                residual_history: history,
            });
        }
    }
    files.push("metadata.json".to_string());
    meta.files = files;
    let json = serde_json::to_string_pretty(&meta).map_err(|e| io_error(dir, e))?;
    write_file(dir, "metadata.json", &(json + "\n"))
}

fn read_table(path: &Path, columns: usize) -> Result<Vec<Vec<Vec<f64>>>> {
    let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    let mut blocks = vec![Vec::new()];
    for (number, line) in text.lines().enumerate() {
        if line.starts_with('#') {
            continue;
        }
        if line.trim().is_empty() {
            if !blocks.last().map_or(true, Vec::is_empty) {
                blocks.push(Vec::new());
            }
            continue;
        }
        let row: Vec<f64> = line
            .split('\t')
            .map(|v| v.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| io_error(path, format!("line {}: {e}", number + 1)))?;
        if row.len() != columns {
            return Err(io_error(path, format!("line {}: expected {columns} columns, found {}", number + 1, row.len())));
        }
        blocks.last_mut().expect("non-empty").push(row);
    }
    if blocks.last().map_or(false, Vec::is_empty) {
        blocks.pop();
    }
    if blocks.is_empty() {
        return Err(io_error(path, "no data rows"));
    }
    Ok(blocks)
}

fn two_columns(rows: &[Vec<f64>], a: usize, b: usize, header: &str) -> String {
    let mut text = format!("# {header}\n");
    for r in rows {
        let _ = writeln!(text, "{:.16e} {:.16e}", r[a], r[b]);
    }
    text
}

/// Writes `boundary.dat` (t, u(0,t)), `mass.dat` (t, mass) and one
/// `snapshot_NNN.dat` (x, u(x,t*)) per stored time, for whichever inputs
/// the run directory has. Returns the written paths.
pub fn plotdata(run: &Path, out: Option<&Path>) -> Result<Vec<PathBuf>> {
    let meta_path = run.join("metadata.json");
    let meta_text = fs::read_to_string(&meta_path).map_err(|e| io_error(&meta_path, e))?;
    let meta: Metadata = serde_json::from_str(&meta_text).map_err(|e| io_error(&meta_path, e))?;
    if !meta.converged {
        return Err(io_error(run, "run did not converge; nothing to plot"));
    }
    let dest = out.map(Path::to_path_buf).unwrap_or_else(|| run.join("plot"));
    fs::create_dir_all(&dest).map_err(|e| io_error(&dest, e))?;
    let mut written = Vec::new();
    let mut emit = |name: String, text: String| -> Result<()> {
        let path = dest.join(&name);
        fs::write(&path, text).map_err(|e| io_error(&path, e))?;
        written.push(path);
        Ok(())
    };
    for file in &meta.files {
        let path = run.join(file);
        match file.as_str() {
            "boundary.tsv" => {
                let rows = read_table(&path, 4)?.concat();
                emit("boundary.dat".into(), two_columns(&rows, 0, 1, "t u(0,t)"))?;
            }
            "mass.tsv" => {
                let rows = read_table(&path, 2)?.concat();
                emit("mass.dat".into(), two_columns(&rows, 0, 1, "t mass"))?;
            }
            "field.tsv" => {
                for (j, block) in read_table(&path, 3)?.iter().enumerate() {
                    let header = format!("x u(x,t) at t = {:.16e}", block[0][0]);
                    emit(format!("snapshot_{j:03}.dat"), two_columns(block, 1, 2, &header))?;
                }
            }
            _ => {}
        }
    }
    Ok(written)
}
