//! Plot-ready tables written as CSV (with `#` metadata lines) or JSON.

use std::io::Write;

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::config::{OutputFormat, RunConfig};
use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Empty,
}

impl Cell {
    /// Floats carry 17 significant digits.
    pub fn render(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(f) => format!("{f:.16e}"),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Empty => Value::Null,
            other => Value::String(other.render()),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
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

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(if v { "true" } else { "false" }.to_string())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub command: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(command: &str, columns: &[&str]) -> Self {
        Self {
            command: command.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(
            row.len(),
            self.columns.len(),
            "row width must match the header"
        );
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn write(&self, config: &RunConfig, out: &mut impl Write) -> Result<(), CliError> {
        match config.format {
            OutputFormat::Csv => self.write_csv(config, out),
            OutputFormat::Json => self.write_json(config, out),
        }
    }

    fn write_csv(&self, config: &RunConfig, out: &mut impl Write) -> Result<(), CliError> {
        writeln!(out, "# hosc {}", env!("CARGO_PKG_VERSION"))?;
        writeln!(out, "# command {}", self.command)?;
        writeln!(out, "# config_sha256 {}", config_hash(config))?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns).map_err(csv_error)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))
                .map_err(csv_error)?;
        }
        w.flush()?;
        Ok(())
    }

    fn write_json(&self, config: &RunConfig, out: &mut impl Write) -> Result<(), CliError> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Array(r.iter().map(Cell::to_json).collect()))
            .collect();
        let doc = json!({
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "config_sha256": config_hash(config),
            "columns": self.columns,
            "rows": rows,
        });
        serde_json::to_writer_pretty(&mut *out, &doc).map_err(|e| CliError::Io(e.into()))?;
        writeln!(out)?;
        Ok(())
    }

    pub fn render(&self, config: &RunConfig) -> Result<String, CliError> {
        let mut buf = Vec::new();
        self.write(config, &mut buf)?;
        Ok(String::from_utf8(buf).expect("tables are UTF-8"))
    }
}

fn csv_error(e: csv::Error) -> CliError {
    CliError::Io(std::io::Error::other(e.to_string()))
}

/// SHA-256 of the canonical config text, ignoring the output path.
pub fn config_hash(config: &RunConfig) -> String {
    let canonical = RunConfig {
        output: None,
        ..config.clone()
    };
    hex::encode(Sha256::digest(canonical.to_text().as_bytes()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_rendering_has_seventeen_digits() {
        assert_eq!(Cell::from(0.1).render(), "1.0000000000000001e-1");
        let back: f64 = Cell::from(std::f64::consts::PI).render().parse().unwrap();
        assert_eq!(back, std::f64::consts::PI);
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new("demo", &["a", "b"]);
        t.push(vec![Cell::from(1usize), Cell::from("x,y")]);
        let s = t.render(&RunConfig::default()).unwrap();
        let lines: Vec<&str> = s.lines().collect();
        assert!(lines[0].starts_with("# hosc "));
        assert_eq!(lines[1], "# command demo");
        assert!(lines[2].starts_with("# config_sha256 "));
        assert_eq!(lines[3], "a,b");
        assert_eq!(lines[4], "1,\"x,y\"");
    }

    #[test]
    fn json_values_are_strings() {
        let mut t = Table::new("demo", &["v", "e"]);
        t.push(vec![Cell::from(0.5), Cell::Empty]);
        let config = RunConfig {
            format: OutputFormat::Json,
            ..RunConfig::default()
        };
        let v: Value = serde_json::from_str(&t.render(&config).unwrap()).unwrap();
        assert_eq!(v["rows"][0][0], "5.0000000000000000e-1");
        assert!(v["rows"][0][1].is_null());
    }
}
