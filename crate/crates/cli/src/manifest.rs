//! The JSON run manifest and the bookkeeping that fills it.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const SCHEMA: &str = "geoxray-manifest/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Assertion {
    pub metric: String,
    pub value: f64,
    /// `"<="` or `">="`.
    pub relation: String,
    pub threshold: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema: String,
    pub command: String,
    pub config: Value,
    pub versions: BTreeMap<String, String>,
    pub seed: u64,
    pub threads: usize,
    /// Unix time at start; with `wall_time_s` the only fields that vary
    /// between identical runs.
    pub started_unix_s: f64,
    pub wall_time_s: f64,
    pub metrics: BTreeMap<String, Value>,
    pub assertions: Vec<Assertion>,
    /// Metrics whose assertion failed.
    pub failed: Vec<String>,
    pub warnings: Vec<String>,
    pub artifacts: Vec<String>,
    pub error: Option<String>,
    pub status: i32,
}

impl Manifest {
    pub fn load(path: &Path) -> std::io::Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(std::io::Error::other)
    }
}

/// Collects metrics, assertions and written files during a run.
pub struct Report {
    pub out: PathBuf,
    pub metrics: BTreeMap<String, Value>,
    pub assertions: Vec<Assertion>,
    pub warnings: Vec<String>,
    pub artifacts: Vec<String>,
}

impl Report {
    pub fn new(out: PathBuf) -> Self {
        Self { out, metrics: BTreeMap::new(), assertions: Vec::new(), warnings: Vec::new(), artifacts: Vec::new() }
    }

    pub fn metric(&mut self, name: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("metrics are plain data");
        self.metrics.insert(name.to_string(), v);
    }

    fn check(&mut self, name: &str, value: f64, relation: &str, threshold: f64, passed: bool) {
        self.metric(name, value);
        self.assertions.push(Assertion {
            metric: name.to_string(),
            value,
            relation: relation.to_string(),
            threshold,
            passed,
        });
    }

    /// Records `name = value` and asserts `value ≤ threshold` (NaN fails).
    pub fn check_le(&mut self, name: &str, value: f64, threshold: f64) {
        self.check(name, value, "<=", threshold, value <= threshold);
    }

    pub fn check_ge(&mut self, name: &str, value: f64, threshold: f64) {
        self.check(name, value, ">=", threshold, value >= threshold);
    }

    pub fn warn(&mut self, msg: impl Into<String>) {
        self.warnings.push(msg.into());
    }

    /// Creates `name` in the output directory and records it as an artifact.
    pub fn write(
        &mut self,
        name: &str,
        body: impl FnOnce(&mut BufWriter<File>) -> geoxray::Result<()>,
    ) -> geoxray::Result<()> {
        let mut w = BufWriter::new(File::create(self.out.join(name))?);
        body(&mut w)?;
        w.flush()?;
        self.artifacts.push(name.to_string());
        Ok(())
    }

    pub fn failed(&self) -> Vec<String> {
        self.assertions.iter().filter(|a| !a.passed).map(|a| a.metric.clone()).collect()
    }
}
