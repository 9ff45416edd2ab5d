//! Self-describing datasets and their CSV/JSON renderings.
//!
//! The CSV layout is stable and diff-friendly:
//!
//! ```text
//! # xychain <command>
//! # key = value            (full effective config, one pair per line)
//! record,<point columns...>
//! point,...                (floats as {:.12e}, deterministic)
//! summary,<scope>,<name>,<value>
//! ```
//!
//! Point rows and summary rows share the file; summary rows always have
//! the four fields above, with `scope` naming the curve they belong to
//! (`lambda2=0.2`, `n=30`, `fit`, ...). The JSON mirror carries the same
//! content with native numbers.

use std::io::Write;

use serde::Serialize;
use serde_json::{json, Value};

use crate::{CliError, CliResult, CommonArgs};
use crate::config::FileConfig;

#[derive(Serialize)]
pub struct Summary {
    pub scope: String,
    pub name: String,
    pub value: Value,
}

#[derive(Serialize)]
pub struct Dataset {
    pub command: &'static str,
    pub config: Vec<(String, String)>,
    pub columns: Vec<&'static str>,
    pub points: Vec<Vec<Value>>,
    pub summaries: Vec<Summary>,
}

pub fn num(v: f64) -> Value {
    json!(v)
}

pub fn int(v: usize) -> Value {
    json!(v)
}

pub fn text(v: &str) -> Value {
    Value::String(v.to_string())
}

pub fn opt_num(v: Option<f64>) -> Value {
    match v {
        Some(x) => json!(x),
        None => Value::Null,
    }
}

impl Dataset {
    pub fn new(command: &'static str, columns: Vec<&'static str>) -> Self {
        Dataset {
            command,
            config: Vec::new(),
            columns,
            points: Vec::new(),
            summaries: Vec::new(),
        }
    }

    pub fn config(&mut self, key: &str, value: impl std::fmt::Display) {
        self.config.push((key.to_string(), value.to_string()));
    }

    pub fn point(&mut self, cells: Vec<Value>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.points.push(cells);
    }

    pub fn summary(&mut self, scope: impl Into<String>, name: &str, value: Value) {
        self.summaries.push(Summary {
            scope: scope.into(),
            name: name.to_string(),
            value,
        });
    }

    /// Number of failed equivalence checks, if this dataset carries any.
    /// Used by `oracle-check` to set the exit code.
    pub fn failed_checks(&self) -> Option<usize> {
        if self.command != "oracle-check" {
            return None;
        }
        let passed_col = self.columns.iter().position(|c| *c == "passed")?;
        let failures = self
            .points
            .iter()
            .filter(|row| row[passed_col].as_u64() == Some(0))
            .count();
        (failures > 0).then_some(failures)
    }

    fn render_cell(value: &Value, out: &mut String) {
        match value {
            Value::Null => out.push_str("none"),
            Value::Number(n) => {
                if let Some(i) = n.as_i64() {
                    out.push_str(&i.to_string());
                } else if let Some(u) = n.as_u64() {
                    out.push_str(&u.to_string());
                } else {
                    out.push_str(&format!("{:.12e}", n.as_f64().unwrap()));
                }
            }
            Value::String(s) => out.push_str(s),
            other => out.push_str(&other.to_string()),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# xychain {}\n", self.command));
        for (key, value) in &self.config {
            out.push_str(&format!("# {key} = {value}\n"));
        }
        out.push_str("record,");
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.points {
            out.push_str("point");
            for cell in row {
                out.push(',');
                Self::render_cell(cell, &mut out);
            }
            out.push('\n');
        }
        for s in &self.summaries {
            out.push_str(&format!("summary,{},{},", s.scope, s.name));
            Self::render_cell(&s.value, &mut out);
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("dataset serializes");
        text.push('\n');
        text
    }
}

/// Where and how to write a dataset.
pub struct Sink {
    path: Option<String>,
    format: Format,
}

#[derive(Clone, Copy, PartialEq)]
enum Format {
    Csv,
    Json,
    Both,
}

impl Sink {
    pub fn resolve(common: &CommonArgs, file: &FileConfig) -> CliResult<Self> {
        let path = common
            .output
            .clone()
            .or_else(|| file.get_string("output"))
            .filter(|p| p != "-");
        let format = match common
            .format
            .clone()
            .or_else(|| file.get_string("format"))
            .unwrap_or_else(|| "csv".to_string())
            .as_str()
        {
            "csv" => Format::Csv,
            "json" => Format::Json,
            "both" => Format::Both,
            other => {
                return Err(CliError::Validation(format!(
                    "format must be csv, json or both, got {other:?}"
                )))
            }
        };
        if format == Format::Both && path.is_none() {
            return Err(CliError::Validation(
                "format both needs --output with a file path".into(),
            ));
        }
        Ok(Sink { path, format })
    }

    pub fn write(&self, dataset: &Dataset) -> CliResult<()> {
        let emit = |path: Option<&str>, content: &str| -> CliResult<()> {
            match path {
                None => {
                    let mut stdout = std::io::stdout().lock();
                    stdout
                        .write_all(content.as_bytes())
                        .map_err(|e| CliError::Runtime(format!("stdout: {e}")))
                }
                Some(p) => std::fs::write(p, content)
                    .map_err(|e| CliError::Runtime(format!("cannot write {p}: {e}"))),
            }
        };
        match self.format {
            Format::Csv => emit(self.path.as_deref(), &dataset.to_csv()),
            Format::Json => emit(self.path.as_deref(), &dataset.to_json()),
            Format::Both => {
                let path = self.path.as_deref().expect("checked in resolve");
                emit(Some(path), &dataset.to_csv())?;
                emit(Some(&format!("{path}.json")), &dataset.to_json())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut d = Dataset::new("sweep", vec!["lambda1", "discord"]);
        d.config("n", 20);
        d.point(vec![num(0.005), num(0.32212345)]);
        d.summary("lambda2=0.2", "l_f", num(0.2));
        d.summary("lambda2=0.2", "esd_lambda1", opt_num(None));
        let csv = d.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "# xychain sweep");
        assert_eq!(lines[1], "# n = 20");
        assert_eq!(lines[2], "record,lambda1,discord");
        assert!(lines[3].starts_with("point,5.000000000000e-3,"));
        assert_eq!(lines[4], "summary,lambda2=0.2,l_f,2.000000000000e-1");
        assert_eq!(lines[5], "summary,lambda2=0.2,esd_lambda1,none");
    }

    #[test]
    fn json_mirrors_content() {
        let mut d = Dataset::new("gap", vec!["n", "gap"]);
        d.point(vec![int(20), num(0.015)]);
        let parsed: Value = serde_json::from_str(&d.to_json()).unwrap();
        assert_eq!(parsed["command"], "gap");
        assert_eq!(parsed["points"][0][0], 20);
    }
}
