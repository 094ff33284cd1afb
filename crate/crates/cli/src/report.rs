//! JSON reports.

use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::Value;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// A number together with the tolerance it was checked at.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Checked {
    pub value: f64,
    pub tol: f64,
}

impl Checked {
    pub fn new(value: f64, tol: f64) -> Self {
        Self { value, tol }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub version: &'static str,
    pub seed: Option<u64>,
    pub restarts: Option<usize>,
    pub body: Value,
    /// Short human-readable lines, also printed to stdout.
    pub summary: Vec<String>,
}

impl Report {
    pub fn new(command: &str, seed: Option<u64>, restarts: Option<usize>) -> Self {
        Self {
            command: command.to_string(),
            version: VERSION,
            seed,
            restarts,
            body: Value::Object(Default::default()),
            summary: Vec::new(),
        }
    }

    pub fn set(&mut self, key: &str, value: impl Serialize) -> Result<()> {
        let v = serde_json::to_value(value)?;
        self.body
            .as_object_mut()
            .expect("report body is an object")
            .insert(key.to_string(), v);
        Ok(())
    }

    pub fn line(&mut self, s: impl Into<String>) {
        self.summary.push(s.into());
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let path = dir.join("report.json");
        std::fs::write(&path, serde_json::to_string_pretty(self)?)
            .with_context(|| format!("writing {}", path.display()))
    }
}
