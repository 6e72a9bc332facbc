//! Tabular output shared by all subcommands. CSV carries metadata in `#`
//! lines around a header and data rows; JSON mirrors the same fields.

use std::io::Write;

use hcquad::RateFit;
use serde_json::{json, Map, Value};

use crate::args::Format;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i128),
    Float(f64),
    Text(String),
    Missing,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format_float(*v),
            Cell::Text(s) => s.clone(),
            Cell::Missing => String::new(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            // non-finite values become null
            Cell::Float(v) => json!(v),
            Cell::Text(s) => json!(s),
            Cell::Missing => Value::Null,
        }
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i128)
    }
}
impl From<u128> for Cell {
    fn from(v: u128) -> Self {
        Cell::Int(v as i128)
    }
}
impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(i128::from(v))
    }
}
impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(i128::from(v))
    }
}
impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}
impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}
impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}
impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(v.to_string())
    }
}
impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Missing, Into::into)
    }
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub command: String,
    pub metadata: Vec<(String, Cell)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Key-value lines emitted after the rows.
    pub summary: Vec<(String, Cell)>,
    pub fits: Vec<(String, RateFit)>,
}

impl Table {
    pub fn new(command: &str, columns: &[&str]) -> Self {
        Self {
            command: command.to_owned(),
            columns: columns.iter().map(|c| (*c).to_owned()).collect(),
            ..Self::default()
        }
    }

    pub fn meta(&mut self, key: &str, value: impl Into<Cell>) -> &mut Self {
        self.metadata.push((key.to_owned(), value.into()));
        self
    }

    pub fn summarize(&mut self, key: &str, value: impl Into<Cell>) -> &mut Self {
        self.summary.push((key.to_owned(), value.into()));
        self
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> std::io::Result<()> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => {
                serde_json::to_writer_pretty(&mut *out, &self.to_json())?;
                writeln!(out)
            }
        }
    }

    fn write_csv(&self, out: &mut dyn Write) -> std::io::Result<()> {
        writeln!(out, "# command={}", self.command)?;
        for (k, v) in &self.metadata {
            writeln!(out, "# {k}={}", v.render())?;
        }
        let mut csv = csv::Writer::from_writer(Vec::new());
        csv.write_record(&self.columns)?;
        for row in &self.rows {
            csv.write_record(row.iter().map(Cell::render))?;
        }
        out.write_all(&csv.into_inner().map_err(|e| e.into_error())?)?;
        for (k, v) in &self.summary {
            writeln!(out, "# {k}={}", v.render())?;
        }
        for (label, fit) in &self.fits {
            writeln!(
                out,
                "# fit[{label}] slope={} intercept={} samples={} log_correction_exponent={}",
                format_float(fit.slope),
                format_float(fit.intercept),
                fit.samples.len(),
                fit.log_correction_exponent.map_or_else(String::new, format_float),
            )?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let pairs = |items: &[(String, Cell)]| -> Map<String, Value> {
            items.iter().map(|(k, v)| (k.clone(), v.to_json())).collect()
        };
        let fits: Vec<Value> = self
            .fits
            .iter()
            .map(|(label, fit)| {
                json!({
                    "label": label,
                    "slope": fit.slope,
                    "intercept": fit.intercept,
                    "samples": fit.samples,
                    "log_correction_exponent": fit.log_correction_exponent,
                })
            })
            .collect();
        json!({
            "command": self.command,
            "metadata": pairs(&self.metadata),
            "columns": self.columns,
            "rows": self.rows.iter().map(|r| r.iter().map(Cell::to_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "summary": pairs(&self.summary),
            "fits": fits,
        })
    }
}
