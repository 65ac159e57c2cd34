//! Plot-ready tables and their CSV and JSON encodings.

use std::io::Write;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Bool(bool),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::Int(x)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Bool(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(x: Option<T>) -> Self {
        x.map_or(Cell::Empty, Into::into)
    }
}

/// Formats with 12 significant digits, independent of locale.
pub fn format_num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    let mag = rounded.abs();
    if (1e-4..1e15).contains(&mag) {
        format!("{rounded}")
    } else {
        format!("{rounded:e}")
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => format_num(*x),
            Cell::Int(n) => n.to_string(),
            Cell::Bool(b) => u8::from(*b).to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            // non-finite values become null
            Cell::Num(x) => serde_json::Number::from_f64(format_num(*x).parse().unwrap_or(*x))
                .map_or(Value::Null, Value::Number),
            Cell::Int(n) => Value::from(*n),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Empty => Value::Null,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Encode as one JSON object rather than an array of them.
    pub single: bool,
}

impl Table {
    pub fn new(columns: Vec<String>) -> Self {
        Self {
            columns,
            ..Self::default()
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(
            row.len(),
            self.columns.len(),
            "row width does not match header"
        );
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let err = |e: csv::Error| CliError::Write(e.to_string());
        w.write_record(&self.columns).map_err(err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv)).map_err(err)?;
        }
        w.flush().map_err(|e| CliError::Write(e.to_string()))
    }

    pub fn to_json(&self) -> Value {
        let records: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .cloned()
                    .zip(row.iter().map(Cell::json))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        if self.single && records.len() == 1 {
            records.into_iter().next().unwrap()
        } else {
            Value::Array(records)
        }
    }

    pub fn write<W: Write>(&self, format: Format, mut out: W) -> Result<()> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => {
                let text = serde_json::to_string_pretty(&self.to_json())
                    .map_err(|e| CliError::Write(e.to_string()))?;
                writeln!(out, "{text}").map_err(|e| CliError::Write(e.to_string()))
            }
        }
    }
}
