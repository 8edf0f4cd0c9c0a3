//! Report model and its two serializations.
//!
//! The CSV holds the per-line or per-`R` table, one header row and no
//! comments, so gnuplot reads it with `set datafile separator ","` and
//! `columnheader`. The JSON-lines file holds one `header` record, one
//! `assertion` record per check, one `fit` record per fitted slope and a
//! closing `summary` record.

use std::io::Write;

use serde::Serialize;
use serde_json::json;
use synthlab_core::numeric::LineFit;

use crate::config::ExperimentConfig;

pub const SCHEMA: &str = "synthlab-report/1";
pub const TOOL: &str = "synthlab";

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Bool(bool),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<i32> for Cell {
    fn from(v: i32) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Real(v) => format!("{v:e}"),
            Cell::Bool(v) => u8::from(*v).to_string(),
            Cell::Text(v) => v.clone(),
        }
    }

    fn is_finite(&self) -> bool {
        !matches!(self, Cell::Real(v) if !v.is_finite())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    /// `value ≤ bound`.
    #[serde(rename = "<=")]
    Le,
    /// `value ≥ bound`.
    #[serde(rename = ">=")]
    Ge,
}

/// A checked inequality. `slack` is signed so that nonnegative means
/// satisfied; the check passes when `slack ≥ -tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assertion {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub relation: Relation,
    pub tolerance: f64,
    pub slack: f64,
    pub pass: bool,
}

impl Assertion {
    pub fn new(name: impl Into<String>, value: f64, relation: Relation, bound: f64, tolerance: f64) -> Self {
        let slack = match relation {
            Relation::Le => bound - value,
            Relation::Ge => value - bound,
        };
        Assertion {
            name: name.into(),
            value,
            bound,
            relation,
            tolerance,
            slack,
            pass: slack >= -tolerance,
        }
    }

    pub fn le(name: impl Into<String>, value: f64, bound: f64, tolerance: f64) -> Self {
        Self::new(name, value, Relation::Le, bound, tolerance)
    }

    pub fn ge(name: impl Into<String>, value: f64, bound: f64, tolerance: f64) -> Self {
        Self::new(name, value, Relation::Ge, bound, tolerance)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Fit {
    pub name: String,
    pub slope: f64,
    pub intercept: f64,
    pub residual: f64,
    /// Slope the theory predicts, when there is one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub predicted: Option<f64>,
}

impl Fit {
    pub fn from_line(name: impl Into<String>, fit: &LineFit, predicted: Option<f64>) -> Self {
        Fit {
            name: name.into(),
            slope: fit.slope,
            intercept: fit.intercept,
            residual: fit.residual,
            predicted,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub config: ExperimentConfig,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub assertions: Vec<Assertion>,
    pub fits: Vec<Fit>,
    /// Named scalars for the summary record.
    pub values: Vec<(String, f64)>,
    pub notes: Vec<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("row {row} has {got} cells, expected {expected}")]
    Shape { row: usize, got: usize, expected: usize },
    #[error("non-finite value in {0}")]
    NonFinite(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Report {
    pub fn new(config: &ExperimentConfig, columns: &[&str]) -> Self {
        Report {
            config: config.canonical(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            assertions: Vec::new(),
            fits: Vec::new(),
            values: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn row(&mut self, cells: Vec<Cell>) {
        self.rows.push(cells);
    }

    pub fn assert(&mut self, a: Assertion) {
        self.assertions.push(a);
    }

    pub fn fit(&mut self, name: &str, fit: Option<&LineFit>, predicted: Option<f64>) {
        match fit {
            Some(f) => self.fits.push(Fit::from_line(name, f, predicted)),
            None => self.notes.push(format!("{name}: too few positive points to fit")),
        }
    }

    pub fn value(&mut self, name: &str, v: f64) {
        self.values.push((name.to_string(), v));
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Assertion> {
        self.assertions.iter().filter(|a| !a.pass)
    }

    /// Every row has the right width and every number is finite.
    pub fn validate(&self) -> Result<(), ReportError> {
        for (i, row) in self.rows.iter().enumerate() {
            if row.len() != self.columns.len() {
                return Err(ReportError::Shape {
                    row: i,
                    got: row.len(),
                    expected: self.columns.len(),
                });
            }
            if let Some(j) = row.iter().position(|c| !c.is_finite()) {
                return Err(ReportError::NonFinite(format!("row {i}, column `{}`", self.columns[j])));
            }
        }
        for a in &self.assertions {
            for (what, v) in [
                ("value", a.value),
                ("bound", a.bound),
                ("tolerance", a.tolerance),
                ("slack", a.slack),
            ] {
                if !v.is_finite() {
                    return Err(ReportError::NonFinite(format!("assertion `{}` {what}", a.name)));
                }
            }
        }
        for f in &self.fits {
            if ![f.slope, f.intercept, f.residual].iter().all(|v| v.is_finite()) {
                return Err(ReportError::NonFinite(format!("fit `{}`", f.name)));
            }
        }
        for (name, v) in &self.values {
            if !v.is_finite() {
                return Err(ReportError::NonFinite(format!("value `{name}`")));
            }
        }
        Ok(())
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), ReportError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_jsonl<W: Write>(&self, mut out: W) -> Result<(), ReportError> {
        let header = json!({
            "record": "header",
            "tool": TOOL,
            "version": env!("CARGO_PKG_VERSION"),
            "schema": SCHEMA,
            "command": self.config.command.name(),
            "seed": self.config.seed,
            "config": self.config.echo(),
            "columns": self.columns,
        });
        writeln!(out, "{header}")?;
        for a in &self.assertions {
            let mut v = serde_json::to_value(a)?;
            v["record"] = json!("assertion");
            writeln!(out, "{v}")?;
        }
        for f in &self.fits {
            let mut v = serde_json::to_value(f)?;
            v["record"] = json!("fit");
            writeln!(out, "{v}")?;
        }
        let values: serde_json::Map<String, serde_json::Value> =
            self.values.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
        let summary = json!({
            "record": "summary",
            "rows": self.rows.len(),
            "assertions": self.assertions.len(),
            "failed": self.failures().count(),
            "pass": self.passed(),
            "values": values,
            "notes": self.notes,
        });
        writeln!(out, "{summary}")?;
        Ok(())
    }
}
