//! Tables with a reproducibility header, written as CSV or JSON.

use std::io::Write;

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::{CliError, CliResult};

pub const TOOL: &str = "opaz";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Rounds to 15 significant digits.
pub fn round15(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.14e}").parse().unwrap_or(x)
}

/// Text form of a float: 15 significant digits, shortest spelling.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let r = round15(x);
    let a = r.abs();
    if r == 0.0 || (1e-5..1e16).contains(&a) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Bool(bool),
    Text(String),
    Empty,
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::Float(x) => fmt_f64(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Float(x) if x.is_finite() => json!(round15(*x)),
            Cell::Float(x) => Value::String(fmt_f64(*x)),
            Cell::Int(i) => json!(i),
            Cell::Bool(b) => json!(b),
            Cell::Text(s) => json!(s),
            Cell::Empty => Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<u32> for Cell {
    fn from(x: u32) -> Self {
        Cell::Int(i64::from(x))
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

/// The result of one command: a table plus scalar summary entries.
#[derive(Debug, Clone)]
pub struct Report {
    pub command: String,
    pub config: Value,
    pub summary: Vec<(String, Cell)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Extra structured JSON, emitted only in JSON output.
    pub detail: Option<Value>,
    /// Overall verdict for commands that check something.
    pub passed: Option<bool>,
}

impl Report {
    pub fn new(command: &str, config: Value, columns: &[&str]) -> Self {
        Report {
            command: command.to_string(),
            config,
            summary: Vec::new(),
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
            detail: None,
            passed: None,
        }
    }

    pub fn summary(&mut self, key: &str, value: impl Into<Cell>) {
        self.summary.push((key.to_string(), value.into()));
    }

    pub fn row(&mut self, cells: Vec<Cell>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }

    pub fn render(&self, format: Format) -> CliResult<Vec<u8>> {
        match format {
            Format::Csv => self.render_csv(),
            Format::Json => self.render_json(),
        }
    }

    fn render_csv(&self) -> CliResult<Vec<u8>> {
        let mut out = Vec::new();
        let config = serde_json::to_string(&self.config).expect("config is plain JSON");
        writeln!(out, "# {TOOL} {VERSION}").unwrap();
        writeln!(out, "# command {}", self.command).unwrap();
        writeln!(out, "# config {config}").unwrap();
        for (k, v) in &self.summary {
            writeln!(out, "# {k}={}", v.text()).unwrap();
        }
        if let Some(p) = self.passed {
            writeln!(out, "# passed={p}").unwrap();
        }
        let mut w = csv::Writer::from_writer(out);
        let csv_err = |e: csv::Error| CliError::BadInput(format!("csv output: {e}"));
        w.write_record(&self.columns).map_err(csv_err)?;
        for r in &self.rows {
            w.write_record(r.iter().map(Cell::text)).map_err(csv_err)?;
        }
        w.into_inner().map_err(|e| CliError::BadInput(format!("csv output: {e}")))
    }

    fn render_json(&self) -> CliResult<Vec<u8>> {
        let summary: Map<String, Value> = self.summary.iter().map(|(k, v)| (k.clone(), v.json())).collect();
        let rows: Vec<Value> = self.rows.iter().map(|r| Value::Array(r.iter().map(Cell::json).collect())).collect();
        let mut result = json!({
            "summary": summary,
            "columns": self.columns,
            "rows": rows,
        });
        if let Some(p) = self.passed {
            result["passed"] = json!(p);
        }
        if let Some(d) = &self.detail {
            result["detail"] = d.clone();
        }
        let doc = json!({
            "tool": TOOL,
            "version": VERSION,
            "command": self.command,
            "config": self.config,
            "result": result,
        });
        let mut out = serde_json::to_vec_pretty(&doc).expect("plain JSON");
        out.push(b'\n');
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fifteen_digits() {
        assert_eq!(fmt_f64(2.0f64.sqrt()), "1.4142135623731");
        assert_eq!(fmt_f64(0.1 + 0.2), "0.3");
        assert_eq!(fmt_f64(1e-300), "1e-300");
        assert_eq!(fmt_f64(-2.5), "-2.5");
        assert_eq!(fmt_f64(f64::NAN), "nan");
        assert_eq!(fmt_f64(0.0), "0");
    }

    #[test]
    fn csv_has_header_and_columns() {
        let mut r = Report::new("norm", json!({"tol": 1e-9}), &["a", "b"]);
        r.summary("size", 128usize);
        r.row(vec![Cell::Float(1.0 / 3.0), Cell::Bool(true)]);
        let text = String::from_utf8(r.render(Format::Csv).unwrap()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], format!("# opaz {VERSION}"));
        assert_eq!(lines[1], "# command norm");
        assert!(lines[2].starts_with("# config {"));
        assert_eq!(lines[3], "# size=128");
        assert_eq!(lines[4], "a,b");
        assert_eq!(lines[5], "0.333333333333333,true");
    }

    #[test]
    fn json_round_trips() {
        let mut r = Report::new("norm", json!({}), &["x"]);
        r.row(vec![Cell::Float(std::f64::consts::PI)]);
        let v: Value = serde_json::from_slice(&r.render(Format::Json).unwrap()).unwrap();
        assert_eq!(v["tool"], "opaz");
        assert_eq!(v["result"]["columns"][0], "x");
        assert_eq!(v["result"]["rows"][0][0].as_f64().unwrap(), round15(std::f64::consts::PI));
    }
}
