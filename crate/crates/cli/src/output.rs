//! Tabular output as CSV or JSON, with a reproducibility header.

use clap::ValueEnum;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
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
    List(Vec<f64>),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.into())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<Vec<f64>> for Cell {
    fn from(v: Vec<f64>) -> Self {
        Cell::List(v)
    }
}

/// Rounds to 12 significant digits.
pub fn round12(v: f64) -> f64 {
    if v.is_finite() {
        format!("{v:.11e}").parse().unwrap_or(v)
    } else {
        v
    }
}

fn num_text(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        let r = round12(v);
        if r == 0.0 || (1e-6..1e15).contains(&r.abs()) {
            r.to_string()
        } else {
            format!("{r:e}")
        }
    }
}

fn num_json(v: f64) -> Value {
    if v.is_finite() {
        json!(round12(v))
    } else {
        Value::Null
    }
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::Num(v) => num_text(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::List(vs) => vs.iter().map(|v| num_text(*v)).collect::<Vec<_>>().join(";"),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) => num_json(*v),
            Cell::Int(v) => json!(v),
            Cell::Bool(v) => json!(v),
            Cell::Text(s) => json!(s),
            Cell::List(vs) => Value::Array(vs.iter().map(|v| num_json(*v)).collect()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self { columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Renders `table` with a header naming the version, command, config hash
/// and seed. The resolved config is embedded so the run can be repeated.
pub fn render(table: &Table, command: &str, config: &RunConfig, format: Format) -> CliResult<Vec<u8>> {
    let config_json = serde_json::to_value(config).map_err(|e| CliError::Runtime(e.to_string()))?;
    match format {
        Format::Csv => {
            let mut out = Vec::new();
            let header = [
                format!("# catbreed {VERSION}"),
                format!("# command {command}"),
                format!("# config_sha256 {}", config.hash()),
                format!("# seed {}", config.seed),
                format!("# config {config_json}"),
            ];
            for line in header {
                out.extend_from_slice(line.as_bytes());
                out.push(b'\n');
            }
            let mut w = csv::Writer::from_writer(out);
            w.write_record(&table.columns)?;
            for row in &table.rows {
                w.write_record(row.iter().map(Cell::text))?;
            }
            w.into_inner().map_err(|e| CliError::Runtime(e.to_string()))
        }
        Format::Json => {
            let rows: Vec<Value> = table
                .rows
                .iter()
                .map(|row| {
                    Value::Object(table.columns.iter().zip(row).map(|(c, v)| (c.to_string(), v.json())).collect())
                })
                .collect();
            let doc = json!({
                "schema_version": SCHEMA_VERSION,
                "version": VERSION,
                "command": command,
                "config_sha256": config.hash(),
                "seed": config.seed,
                "config": config_json,
                "columns": table.columns,
                "rows": rows,
            });
            let mut out = serde_json::to_vec_pretty(&doc).map_err(|e| CliError::Runtime(e.to_string()))?;
            out.push(b'\n');
            Ok(out)
        }
    }
}
