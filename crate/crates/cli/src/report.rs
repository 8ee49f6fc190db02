//! Report assembly and the two output files.

use crate::config::ExperimentConfig;
use serde::Serialize;
use serde_json::{Map, Value};
use std::fmt::Write as _;
use std::io;
use std::path::Path;

pub const REPORT_SCHEMA_ID: &str = "sanovlab.report/v1";

/// A single inequality `value <= bound` or `value >= bound`.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub relation: &'static str,
    pub bound: f64,
    pub pass: bool,
}

impl Check {
    pub fn le(name: impl Into<String>, value: f64, bound: f64, tol: f64) -> Self {
        let pass = value <= bound + tol || (value == f64::NEG_INFINITY && bound == f64::NEG_INFINITY);
        Self { name: name.into(), value, relation: "<=", bound, pass }
    }

    pub fn ge(name: impl Into<String>, value: f64, bound: f64, tol: f64) -> Self {
        let pass = value + tol >= bound || (value == f64::INFINITY && bound == f64::INFINITY);
        Self { name: name.into(), value, relation: ">=", bound, pass }
    }

    pub fn gt(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self { name: name.into(), value, relation: ">", bound, pass: value > bound }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Row {
    pub n: usize,
    pub value: f64,
    pub exponent: f64,
    pub bound: f64,
    pub pass: bool,
    pub checks: Vec<Check>,
    #[serde(flatten)]
    pub extra: Map<String, Value>,
}

impl Row {
    /// `pass` is the conjunction of the checks.
    pub fn new(n: usize, value: f64, exponent: f64, bound: f64, checks: Vec<Check>) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        Self { n, value, exponent, bound, pass, checks, extra: Map::new() }
    }

    pub fn with(mut self, key: &str, value: impl Serialize) -> Self {
        self.extra.insert(key.into(), serde_json::to_value(value).unwrap_or(Value::Null));
        self
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub kind: &'static str,
    pub seed: u64,
    pub cap: usize,
    pub config: ExperimentConfig,
    pub rows: Vec<Row>,
    pub summary: Map<String, Value>,
    pub all_pass: bool,
}

pub fn csv(rows: &[Row]) -> String {
    let mut out = String::from("n,value,exponent,bound,pass\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{},{},{}", r.n, r.value, r.exponent, r.bound, r.pass);
    }
    out
}

pub fn write(report: &Report, dir: &Path) -> io::Result<()> {
    std::fs::create_dir_all(dir)?;
    let json = serde_json::to_string_pretty(report).map_err(io::Error::other)?;
    std::fs::write(dir.join("report.json"), json + "\n")?;
    std::fs::write(dir.join("rates.csv"), csv(&report.rows))
}
