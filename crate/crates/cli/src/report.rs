//! Tabular reports and their CSV / JSON encodings.

use std::io::{self, Write};

use serde_json::{json, Map, Value};
use sharpconvex_core::VerifyReport;

use crate::config::{Command, Format, RunConfig};

/// One table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Bool(bool),
}

impl Cell {
    /// Shortest round-trip text; non-finite values as `NaN`, `inf`, `-inf`.
    pub fn text(&self) -> String {
        match self {
            Cell::Num(v) => format!("{v:?}"),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    pub fn json(&self) -> Value {
        match self {
            Cell::Num(v) if v.is_finite() => json!(v),
            Cell::Num(_) => Value::String(self.text()),
            Cell::Int(v) => json!(v),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Bool(b) => Value::Bool(*b),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v.into())
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

/// Result of one command: a verdict, summary fields and a row table.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: Command,
    pub pass: bool,
    pub summary: Vec<(String, Cell)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Report {
    pub fn new(command: Command, columns: &[&str]) -> Self {
        Report {
            command,
            pass: true,
            summary: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn note(&mut self, key: &str, value: impl Into<Cell>) {
        self.summary.push((key.to_string(), value.into()));
    }

    /// Adds the fields of a [`VerifyReport`] under `prefix`.
    pub fn note_verify(&mut self, prefix: &str, r: &VerifyReport) {
        let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}_{k}") };
        self.summary.push((key("pass"), r.pass.into()));
        self.summary.push((key("worst_margin"), r.worst_margin.into()));
        self.summary.push((key("witness"), r.witness.into()));
        self.summary.push((key("grid_size"), r.grid_size.into()));
        self.summary.push((key("quad_order"), r.quad_order.into()));
        self.summary.push((key("tolerance"), r.tolerance.into()));
    }

    pub fn to_csv(&self) -> io::Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::text))?;
        }
        w.into_inner().map_err(|e| io::Error::other(e.to_string()))
    }

    pub fn to_json(&self, cfg: &RunConfig) -> String {
        let mut summary = Map::new();
        for (k, v) in &self.summary {
            summary.insert(k.clone(), v.json());
        }
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = Map::new();
                for (c, v) in self.columns.iter().zip(row) {
                    obj.insert(c.clone(), v.json());
                }
                Value::Object(obj)
            })
            .collect();
        let doc = json!({
            "command": self.command.as_str(),
            "config": cfg.echo(),
            "params_hash": cfg.params_hash(),
            "pass": self.pass,
            "summary": Value::Object(summary),
            "columns": self.columns,
            "rows": rows,
        });
        let mut text = serde_json::to_string_pretty(&doc).expect("report serializes");
        text.push('\n');
        text
    }

    pub fn encode(&self, cfg: &RunConfig) -> io::Result<Vec<u8>> {
        match cfg.format {
            Format::Csv => self.to_csv(),
            Format::Json => Ok(self.to_json(cfg).into_bytes()),
        }
    }

    /// Writes to `--out` or stdout.
    pub fn write(&self, cfg: &RunConfig) -> io::Result<()> {
        let bytes = self.encode(cfg)?;
        match &cfg.output_path {
            Some(path) if cfg.command != Command::Figures => std::fs::write(path, bytes),
            _ => io::stdout().lock().write_all(&bytes),
        }
    }

    /// One human-readable line for stderr.
    pub fn summary_line(&self) -> String {
        let fields: Vec<String> = self.summary.iter().map(|(k, v)| format!("{k}={}", v.text())).collect();
        format!(
            "{} {}: {}",
            self.command.as_str(),
            if self.pass { "PASS" } else { "FAIL" },
            fields.join(" ")
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cell_text() {
        assert_eq!(Cell::Num(0.5).text(), "0.5");
        assert_eq!(Cell::Num(1e-10).text(), "1e-10");
        assert_eq!(Cell::Num(f64::INFINITY).text(), "inf");
        assert_eq!(Cell::Num(f64::NAN).json(), Value::String("NaN".into()));
        assert_eq!(Cell::Text("a,b".into()).text(), "a,b");
    }

    #[test]
    fn csv_quotes_and_header() {
        let mut r = Report::new(Command::Scan, &["x", "label"]);
        r.push_row(vec![1.5.into(), "a,b".into()]);
        let text = String::from_utf8(r.to_csv().unwrap()).unwrap();
        assert_eq!(text, "x,label\n1.5,\"a,b\"\n");
    }

    #[test]
    fn json_has_echo_and_hash() {
        let cfg = RunConfig::new(Command::Scan);
        let mut r = Report::new(Command::Scan, &["x"]);
        r.push_row(vec![2.0.into()]);
        r.note("count", 1usize);
        let v: Value = serde_json::from_str(&r.to_json(&cfg)).unwrap();
        assert_eq!(v["command"], "scan");
        assert_eq!(v["params_hash"].as_str().unwrap().len(), 64);
        assert_eq!(v["rows"][0]["x"], 2.0);
        assert_eq!(v["config"]["quad_order"], 256);
    }
}
