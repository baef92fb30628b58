//! CSV series written by the harness.
//!
//! Format: comma delimiter, one header row, LF line endings, `.` decimal
//! point. Every real number (timings included) is written in scientific
//! notation with 17 significant digits (`{:.16e}`), which round-trips any
//! `f64` exactly, so parsing a file and writing it back reproduces it byte
//! for byte. A missing value is an empty field.

use std::fmt::Write as _;

use bayesopt::{FirstIterationSnapshot, RunReport};

use crate::error::HarnessError;

pub fn fmt_real(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_real).unwrap_or_default()
}

fn parse_real(field: &str, line: usize) -> Result<f64, HarnessError> {
    field.parse().map_err(|_| HarnessError::Parse { line, message: format!("not a number: '{field}'") })
}

fn parse_opt(field: &str, line: usize) -> Result<Option<f64>, HarnessError> {
    if field.is_empty() {
        Ok(None)
    } else {
        parse_real(field, line).map(Some)
    }
}

fn parse_index(field: &str, line: usize) -> Result<usize, HarnessError> {
    field.parse().map_err(|_| HarnessError::Parse { line, message: format!("not an index: '{field}'") })
}

/// Splits `text` into rows after checking the header.
fn records<'a>(text: &'a str, header: &str) -> Result<Vec<(usize, Vec<&'a str>)>, HarnessError> {
    let mut lines = text.split_terminator('\n').enumerate();
    match lines.next() {
        Some((_, h)) if h == header => {}
        other => {
            return Err(HarnessError::Parse {
                line: 1,
                message: format!("expected header '{header}', found {:?}", other.map(|(_, h)| h)),
            })
        }
    }
    let width = header.split(',').count();
    lines
        .map(|(i, l)| {
            let fields: Vec<&str> = l.split(',').collect();
            if fields.len() == width {
                Ok((i + 1, fields))
            } else {
                Err(HarnessError::Parse {
                    line: i + 1,
                    message: format!("expected {width} fields, found {}", fields.len()),
                })
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub iteration: usize,
    pub x_proposed: f64,
    pub best_so_far: f64,
    pub distance_from_previous: Option<f64>,
}

pub const CONVERGENCE_HEADER: &str = "iteration,x_proposed,best_so_far,distance_from_previous";

impl ConvergenceRow {
    pub fn from_report(report: &RunReport) -> Vec<Self> {
        report
            .trials
            .iter()
            .map(|t| ConvergenceRow {
                iteration: t.iteration,
                x_proposed: t.x_proposed[0],
                best_so_far: t.best_so_far,
                distance_from_previous: t.distance_from_previous,
            })
            .collect()
    }

    pub fn write(rows: &[Self]) -> String {
        let mut out = format!("{CONVERGENCE_HEADER}\n");
        for r in rows {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                r.iteration,
                fmt_real(r.x_proposed),
                fmt_real(r.best_so_far),
                fmt_opt(r.distance_from_previous)
            );
        }
        out
    }

    pub fn parse(text: &str) -> Result<Vec<Self>, HarnessError> {
        records(text, CONVERGENCE_HEADER)?
            .into_iter()
            .map(|(line, f)| {
                Ok(ConvergenceRow {
                    iteration: parse_index(f[0], line)?,
                    x_proposed: parse_real(f[1], line)?,
                    best_so_far: parse_real(f[2], line)?,
                    distance_from_previous: parse_opt(f[3], line)?,
                })
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimingRow {
    pub iteration: usize,
    pub proposal_seconds: f64,
}

pub const TIMING_HEADER: &str = "iteration,proposal_seconds";

impl TimingRow {
    pub fn from_report(report: &RunReport) -> Vec<Self> {
        report
            .trials
            .iter()
            .map(|t| TimingRow { iteration: t.iteration, proposal_seconds: t.proposal_seconds })
            .collect()
    }

    pub fn write(rows: &[Self]) -> String {
        let mut out = format!("{TIMING_HEADER}\n");
        for r in rows {
            let _ = writeln!(out, "{},{}", r.iteration, fmt_real(r.proposal_seconds));
        }
        out
    }

    pub fn parse(text: &str) -> Result<Vec<Self>, HarnessError> {
        records(text, TIMING_HEADER)?
            .into_iter()
            .map(|(line, f)| {
                Ok(TimingRow { iteration: parse_index(f[0], line)?, proposal_seconds: parse_real(f[1], line)? })
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotRow {
    pub x: f64,
    pub gp_mean: f64,
    pub gp_sigma: f64,
    pub acquisition_value: f64,
}

pub const SNAPSHOT_HEADER: &str = "x,gp_mean,gp_sigma,acquisition_value";

impl SnapshotRow {
    pub fn from_snapshot(s: &FirstIterationSnapshot) -> Vec<Self> {
        (0..s.grid.len())
            .map(|i| SnapshotRow {
                x: s.grid[i],
                gp_mean: s.gp_mean[i],
                gp_sigma: s.gp_sigma[i],
                acquisition_value: s.acquisition[i],
            })
            .collect()
    }

    pub fn write(rows: &[Self]) -> String {
        let mut out = format!("{SNAPSHOT_HEADER}\n");
        for r in rows {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                fmt_real(r.x),
                fmt_real(r.gp_mean),
                fmt_real(r.gp_sigma),
                fmt_real(r.acquisition_value)
            );
        }
        out
    }

    pub fn parse(text: &str) -> Result<Vec<Self>, HarnessError> {
        records(text, SNAPSHOT_HEADER)?
            .into_iter()
            .map(|(line, f)| {
                Ok(SnapshotRow {
                    x: parse_real(f[0], line)?,
                    gp_mean: parse_real(f[1], line)?,
                    gp_sigma: parse_real(f[2], line)?,
                    acquisition_value: parse_real(f[3], line)?,
                })
            })
            .collect()
    }
}

/// Timing summary: one row per optimizer, one column per acquisition,
/// cells are mean proposal seconds.
#[derive(Debug, Clone, PartialEq)]
pub struct TimingTable {
    pub columns: Vec<String>,
    pub rows: Vec<(String, Vec<f64>)>,
}

impl TimingTable {
    pub fn write(&self) -> String {
        let mut out = format!("optimizer,{}\n", self.columns.join(","));
        for (label, cells) in &self.rows {
            let cells: Vec<String> = cells.iter().map(|c| fmt_real(*c)).collect();
            let _ = writeln!(out, "{label},{}", cells.join(","));
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        let header = text.split_terminator('\n').next().unwrap_or_default();
        let columns: Vec<String> = match header.split_once(',') {
            Some(("optimizer", rest)) => rest.split(',').map(str::to_owned).collect(),
            _ => return Err(HarnessError::Parse { line: 1, message: format!("unexpected summary header '{header}'") }),
        };
        let rows = records(text, header)?
            .into_iter()
            .map(|(line, f)| {
                let cells = f[1..].iter().map(|c| parse_real(c, line)).collect::<Result<_, _>>()?;
                Ok((f[0].to_owned(), cells))
            })
            .collect::<Result<_, HarnessError>>()?;
        Ok(Self { columns, rows })
    }

    pub fn cell(&self, row: &str, column: &str) -> Option<f64> {
        let j = self.columns.iter().position(|c| c == column)?;
        self.rows.iter().find(|(label, _)| label == row).map(|(_, cells)| cells[j])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn missing_distance_is_empty_field() {
        let rows = vec![
            ConvergenceRow { iteration: 1, x_proposed: 0.5, best_so_far: 1.0, distance_from_previous: None },
            ConvergenceRow { iteration: 2, x_proposed: -0.25, best_so_far: 1.0, distance_from_previous: Some(0.75) },
        ];
        let text = ConvergenceRow::write(&rows);
        assert_eq!(text.lines().nth(1).unwrap(), "1,5.0000000000000000e-1,1.0000000000000000e0,");
        assert_eq!(ConvergenceRow::parse(&text).unwrap(), rows);
    }

    #[test]
    fn bad_input_is_rejected() {
        assert!(TimingRow::parse("iter,seconds\n").is_err());
        assert!(TimingRow::parse("iteration,proposal_seconds\n1,abc\n").is_err());
        assert!(TimingRow::parse("iteration,proposal_seconds\n1\n").is_err());
    }

    #[test]
    fn summary_lookup() {
        let t = TimingTable {
            columns: vec!["mpi".into(), "ei".into()],
            rows: vec![("lbfgs".into(), vec![0.25, 0.5]), ("tnc".into(), vec![1.0, 2.0])],
        };
        let back = TimingTable::parse(&t.write()).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.cell("tnc", "ei"), Some(2.0));
    }

    proptest! {
        #[test]
        fn reals_round_trip_exactly(bits in any::<u64>()) {
            let v = f64::from_bits(bits);
            prop_assume!(v.is_finite());
            let s = fmt_real(v);
            prop_assert_eq!(s.parse::<f64>().unwrap().to_bits(), v.to_bits());
        }

        #[test]
        fn snapshot_csv_is_byte_stable(vals in proptest::collection::vec(-1e3f64..1e3, 4..40)) {
            let rows: Vec<SnapshotRow> = vals
                .chunks_exact(4)
                .map(|c| SnapshotRow { x: c[0], gp_mean: c[1], gp_sigma: c[2].abs(), acquisition_value: c[3].abs() })
                .collect();
            let text = SnapshotRow::write(&rows);
            let again = SnapshotRow::write(&SnapshotRow::parse(&text).unwrap());
            prop_assert_eq!(text, again);
        }
    }
}
