use serde::Serialize;
use serde_json::{Map, Value};

use crate::config::RunConfig;
use crate::error::CliError;

pub const SCHEMA_VERSION: &str = "1.0";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    /// `null` for yes/no checks.
    pub residual: Option<f64>,
    pub tolerance: Option<f64>,
    pub passed: bool,
}

impl Check {
    pub fn residual(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            residual: Some(residual),
            tolerance: Some(tolerance),
            passed: residual.is_finite() && residual <= tolerance,
        }
    }

    pub fn flag(name: impl Into<String>, passed: bool) -> Self {
        Check {
            name: name.into(),
            residual: None,
            tolerance: None,
            passed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SystemInfo {
    pub source: String,
    pub name: Option<String>,
    pub shape: Vec<usize>,
    pub group_dim: usize,
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorInfo {
    pub kind: &'static str,
    pub message: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: &'static str,
    pub command: &'static str,
    pub config: RunConfig,
    pub system: Option<SystemInfo>,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorInfo>,
    /// Command-specific fields, emitted at top level.
    #[serde(flatten)]
    pub data: Map<String, Value>,
    /// Extra lines for the human-readable rendering.
    #[serde(skip)]
    pub summary: Vec<String>,
}

impl Report {
    pub fn new(config: &RunConfig) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            command: config.command.name(),
            config: config.clone(),
            system: None,
            seed: config.seed,
            passed: true,
            checks: Vec::new(),
            error: None,
            data: Map::new(),
            summary: Vec::new(),
        }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn extend(&mut self, checks: impl IntoIterator<Item = Check>) {
        self.checks.extend(checks);
    }

    pub fn set(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("report values serialize");
        self.data.insert(key.to_string(), v);
    }

    pub fn line(&mut self, text: impl Into<String>) {
        self.summary.push(text.into());
    }

    pub fn finish(&mut self) {
        self.passed = self.error.is_none() && self.checks.iter().all(|c| c.passed);
    }

    pub fn fail_with(&mut self, err: &CliError) {
        self.error = Some(ErrorInfo {
            kind: err.kind(),
            message: err.to_string(),
        });
        self.passed = false;
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let system = self
            .system
            .as_ref()
            .map(|s| format!(" [{}]", s.name.as_deref().unwrap_or(&s.source)))
            .unwrap_or_default();
        let status = if self.passed { "PASS" } else { "FAIL" };
        out.push_str(&format!("xprod {}{system}: {status}\n", self.command));
        for line in &self.summary {
            out.push_str(&format!("  {line}\n"));
        }
        for c in &self.checks {
            let mark = if c.passed { "ok  " } else { "FAIL" };
            match (c.residual, c.tolerance) {
                (Some(r), Some(t)) => out.push_str(&format!("  {mark} {}  (residual {r:.3e}, tol {t:.1e})\n", c.name)),
                _ => out.push_str(&format!("  {mark} {}\n", c.name)),
            }
        }
        out
    }
}
