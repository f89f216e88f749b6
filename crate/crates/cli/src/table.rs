//! Row tables rendered as CSV or JSON.
//!
//! Every real number is rounded to 12 significant digits and printed the
//! same way in both formats, so a CSV cell and the matching JSON value are
//! textually identical. Columns keep their insertion order.

use std::fmt::Write as _;

use qcompose::{Error, Result};

const SIG_DIGITS: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Text(String),
    Bool(bool),
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
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

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// Round to 12 significant digits and print in the shortest form that
/// reads back to the rounded value.
pub fn format_real(x: f64) -> Result<String> {
    if !x.is_finite() {
        return Err(Error::Numerical(format!("non-finite value {x} in output")));
    }
    if x == 0.0 {
        return Ok("0".into());
    }
    let rounded: f64 = format!("{:.*e}", SIG_DIGITS - 1, x)
        .parse()
        .map_err(|e| Error::Numerical(format!("rounding {x}: {e}")))?;
    let a = rounded.abs();
    if (1e-5..1e15).contains(&a) {
        Ok(format!("{rounded}"))
    } else {
        Ok(format!("{rounded:e}"))
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Csv => self.render_csv(),
            Format::Json => self.render_json(),
        }
    }

    fn cell_text(cell: &Cell) -> Result<String> {
        Ok(match cell {
            Cell::Int(v) => v.to_string(),
            Cell::Real(v) => format_real(*v)?,
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        })
    }

    fn render_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Numerical(format!("csv: {e}"));
        w.write_record(&self.columns).map_err(io)?;
        for row in &self.rows {
            let cells = row
                .iter()
                .map(Self::cell_text)
                .collect::<Result<Vec<_>>>()?;
            w.write_record(&cells).map_err(io)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| Error::Numerical(format!("csv: {e}")))?;
        String::from_utf8(bytes).map_err(|e| Error::Numerical(format!("csv: {e}")))
    }

    fn render_json(&self) -> Result<String> {
        let mut out = String::from("[");
        for (i, row) in self.rows.iter().enumerate() {
            out.push_str(if i == 0 { "\n  {" } else { ",\n  {" });
            for (j, (name, cell)) in self.columns.iter().zip(row).enumerate() {
                if j > 0 {
                    out.push_str(", ");
                }
                let value = match cell {
                    Cell::Text(s) => serde_json::to_string(s)?,
                    other => Self::cell_text(other)?,
                };
                let _ = write!(out, "{}: {}", serde_json::to_string(name)?, value);
            }
            out.push('}');
        }
        out.push_str(if self.rows.is_empty() { "]\n" } else { "\n]\n" });
        Ok(out)
    }
}
