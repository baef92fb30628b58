//! Experiment drivers behind the `run`, `matrix`, and `snapshot` commands.

use std::fs;
use std::path::{Path, PathBuf};

use bayesopt::objective::objective_grid_argmax;
use bayesopt::{
    first_iteration_snapshot, run_bo, AcquisitionKind, BoConfig, FirstIterationSnapshot, Method, RunReport,
};
use serde::Serialize;

use crate::error::HarnessError;
use crate::table::{fmt_real, ConvergenceRow, SnapshotRow, TimingRow, TimingTable};

/// Grid resolution of the objective-optimum oracle.
pub const ORACLE_GRID_POINTS: usize = 1_000_000;

fn write_file(path: &Path, contents: &str) -> Result<(), HarnessError> {
    fs::write(path, contents).map_err(|source| HarnessError::Io { path: path.to_owned(), source })
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), HarnessError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_file(path, &text)
}

fn ensure_dir(dir: &Path) -> Result<(), HarnessError> {
    fs::create_dir_all(dir).map_err(|source| HarnessError::Io { path: dir.to_owned(), source })
}

#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub report: RunReport,
    pub report_path: PathBuf,
    pub convergence_path: PathBuf,
    pub timing_path: PathBuf,
}

/// Runs one configuration and writes `<tag>_report.json`,
/// `<tag>_convergence.csv`, and `<tag>_timing.csv`. A failed run still
/// leaves its partial report behind.
pub fn run_single(config: &BoConfig, out: &Path) -> Result<RunArtifacts, HarnessError> {
    ensure_dir(out)?;
    let tag = config.tag();
    let report_path = out.join(format!("{tag}_report.json"));
    let report = match run_bo(&mut config.objective()?, config) {
        Ok(r) => r,
        Err(e) => {
            write_json(&report_path, &e.partial)?;
            return Err(e.into());
        }
    };
    write_json(&report_path, &report)?;
    let convergence_path = out.join(format!("{tag}_convergence.csv"));
    write_file(&convergence_path, &ConvergenceRow::write(&ConvergenceRow::from_report(&report)))?;
    let timing_path = out.join(format!("{tag}_timing.csv"));
    write_file(&timing_path, &TimingRow::write(&TimingRow::from_report(&report)))?;
    Ok(RunArtifacts { report, report_path, convergence_path, timing_path })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatrixRow {
    pub acquisition: AcquisitionKind,
    pub method: Method,
    pub mean_proposal_seconds: f64,
    pub final_best: f64,
    /// First iteration whose best observed value is within `delta` of the
    /// grid optimum; `Some(0)` if an initial observation already was.
    pub iterations_to_within_delta: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatrixSummary {
    pub oracle_x: f64,
    pub oracle_f: f64,
    pub delta: f64,
    pub rows: Vec<MatrixRow>,
}

impl MatrixSummary {
    pub fn timing_table(&self) -> TimingTable {
        let columns = AcquisitionKind::ALL.iter().map(|k| k.name().to_owned()).collect();
        let rows = Method::ALL
            .iter()
            .map(|m| {
                let cells = AcquisitionKind::ALL
                    .iter()
                    .map(|k| {
                        self.rows
                            .iter()
                            .find(|r| r.method == *m && r.acquisition == *k)
                            .map_or(f64::NAN, |r| r.mean_proposal_seconds)
                    })
                    .collect();
                (m.name().to_owned(), cells)
            })
            .collect();
        TimingTable { columns, rows }
    }

    pub fn detail_csv(&self) -> String {
        let mut out =
            String::from("acquisition,optimizer,mean_proposal_seconds,final_best,iterations_to_within_delta\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.acquisition,
                r.method,
                fmt_real(r.mean_proposal_seconds),
                fmt_real(r.final_best),
                r.iterations_to_within_delta.map(|i| i.to_string()).unwrap_or_default()
            ));
        }
        out
    }
}

fn iterations_to_within(report: &RunReport, target: f64) -> Option<usize> {
    if report.initial_observations.iter().any(|o| o.y >= target) {
        return Some(0);
    }
    report.trials.iter().find(|t| t.best_so_far >= target).map(|t| t.iteration)
}

#[derive(Debug, Clone)]
pub struct MatrixOutcome {
    pub summary: MatrixSummary,
    pub runs: Vec<RunArtifacts>,
    pub summary_path: PathBuf,
    pub detail_path: PathBuf,
}

/// Runs every (acquisition, optimizer) pair sequentially with the same seed,
/// so all cells share initial observations and the noise stream.
pub fn run_matrix(base: &BoConfig, out: &Path, delta: f64) -> Result<MatrixOutcome, HarnessError> {
    let (oracle_x, oracle_f) =
        objective_grid_argmax(base.bounds.lower()[0], base.bounds.upper()[0], ORACLE_GRID_POINTS)?;
    let mut runs = Vec::new();
    let mut rows = Vec::new();
    for acquisition in AcquisitionKind::ALL {
        for method in Method::ALL {
            let mut config = base.clone();
            config.acquisition.kind = acquisition;
            config.method = method;
            let run = run_single(&config, out)?;
            rows.push(MatrixRow {
                acquisition,
                method,
                mean_proposal_seconds: run.report.mean_proposal_seconds,
                final_best: run.report.final_best.y,
                iterations_to_within_delta: iterations_to_within(&run.report, oracle_f - delta),
            });
            runs.push(run);
        }
    }
    let summary = MatrixSummary { oracle_x, oracle_f, delta, rows };
    let summary_path = out.join("matrix_summary.csv");
    write_file(&summary_path, &summary.timing_table().write())?;
    let detail_path = out.join("matrix_detail.csv");
    write_file(&detail_path, &summary.detail_csv())?;
    Ok(MatrixOutcome { summary, runs, summary_path, detail_path })
}

#[derive(Debug, Clone)]
pub struct SnapshotArtifacts {
    pub snapshot: FirstIterationSnapshot,
    pub grid_path: PathBuf,
    pub proposal_path: PathBuf,
}

#[derive(Serialize)]
struct ProposalRecord<'a> {
    acquisition: AcquisitionKind,
    method: Method,
    seed: u64,
    initial_points: &'a [Vec<f64>],
    x_proposed: &'a [f64],
    acquisition_at_proposal: f64,
    distance_to_nearest_initial: f64,
}

/// Writes `<tag>_snapshot.csv` (GP and acquisition on the 500-point grid)
/// and `<tag>_snapshot.json` (the first proposal).
pub fn run_snapshot(config: &BoConfig, out: &Path) -> Result<SnapshotArtifacts, HarnessError> {
    ensure_dir(out)?;
    let snapshot = first_iteration_snapshot(config, &mut config.objective()?)?;
    let tag = config.tag();
    let grid_path = out.join(format!("{tag}_snapshot.csv"));
    write_file(&grid_path, &SnapshotRow::write(&SnapshotRow::from_snapshot(&snapshot)))?;
    let proposal_path = out.join(format!("{tag}_snapshot.json"));
    write_json(
        &proposal_path,
        &ProposalRecord {
            acquisition: config.acquisition.kind,
            method: config.method,
            seed: config.seed,
            initial_points: &config.initial_points,
            x_proposed: &snapshot.x_proposed,
            acquisition_at_proposal: snapshot.acquisition_at_proposal,
            distance_to_nearest_initial: snapshot.distance_to_nearest_initial,
        },
    )?;
    Ok(SnapshotArtifacts { snapshot, grid_path, proposal_path })
}
