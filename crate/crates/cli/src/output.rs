//! CSV and JSON emission.

use std::io::Write;

use serde::Serialize;

use crate::config::{OutputFormat, ScenarioConfig};
use crate::error::CliError;
use crate::sweep::{RowFailure, SweepResultRow, SWEEP_HEADER};

/// A value in a CSV cell.
pub enum Cell {
    Float(f64),
    Int(i64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            // 17 significant digits round-trip every f64
            Cell::Float(v) => format!("{v:.16e}"),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

pub trait CsvRecord {
    fn header() -> Vec<&'static str>;
    fn cells(&self) -> Vec<Cell>;
}

impl CsvRecord for SweepResultRow {
    fn header() -> Vec<&'static str> {
        SWEEP_HEADER.to_vec()
    }

    fn cells(&self) -> Vec<Cell> {
        vec![
            Cell::Float(self.tau),
            Cell::Int(self.alpha as i64),
            Cell::Int(self.n as i64),
            Cell::Text(self.mode.clone()),
            Cell::Float(self.bures),
            Cell::Float(self.fidelity),
            Cell::Float(self.avg_energy),
            Cell::Float(self.adiabatic_energy),
            Cell::Float(self.excess_energy),
            Cell::Float(self.avg_cost_rate),
            Cell::Float(self.qsl_na),
            Cell::Float(self.qsl_sta),
        ]
    }
}

/// Header line plus one line per record, LF-terminated.
pub fn to_csv<R: CsvRecord>(rows: &[R]) -> String {
    let mut out = R::header().join(",");
    out.push('\n');
    for r in rows {
        let line: Vec<String> = r.cells().iter().map(Cell::render).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
struct Document<'a, R> {
    config: &'a ScenarioConfig,
    rows: &'a [R],
    #[serde(skip_serializing_if = "<[RowFailure]>::is_empty")]
    failures: &'a [RowFailure],
}

pub fn to_json<R: Serialize>(config: &ScenarioConfig, rows: &[R], failures: &[RowFailure]) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(&Document {
        config,
        rows,
        failures,
    })
    .map_err(|e| CliError::Numerical(format!("cannot serialize output: {e}")))?;
    s.push('\n');
    Ok(s)
}

pub fn render<R: CsvRecord + Serialize>(
    config: &ScenarioConfig,
    rows: &[R],
    failures: &[RowFailure],
) -> Result<String, CliError> {
    match config.format {
        OutputFormat::Csv => Ok(to_csv(rows)),
        OutputFormat::Json => to_json(config, rows, failures),
    }
}

/// Writes to `config.out`, or stdout when unset.
pub fn emit(config: &ScenarioConfig, text: &str) -> Result<(), CliError> {
    match &config.out {
        Some(path) => std::fs::write(path, text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

/// Parses a sweep CSV produced by [`to_csv`].
pub fn parse_sweep_csv(text: &str) -> Result<Vec<SweepResultRow>, CliError> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| CliError::Validation("empty csv".into()))?;
    if header != SWEEP_HEADER.join(",") {
        return Err(CliError::Validation(format!("unexpected header '{header}'")));
    }
    let bad = |l: &str| CliError::Validation(format!("malformed row '{l}'"));
    lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            if f.len() != SWEEP_HEADER.len() {
                return Err(bad(l));
            }
            let num = |k: usize| f[k].parse::<f64>().map_err(|_| bad(l));
            let int = |k: usize| f[k].parse::<u32>().map_err(|_| bad(l));
            Ok(SweepResultRow {
                tau: num(0)?,
                alpha: int(1)?,
                n: int(2)?,
                mode: f[3].to_string(),
                bures: num(4)?,
                fidelity: num(5)?,
                avg_energy: num(6)?,
                adiabatic_energy: num(7)?,
                excess_energy: num(8)?,
                avg_cost_rate: num(9)?,
                qsl_na: num(10)?,
                qsl_sta: num(11)?,
            })
        })
        .collect()
}
