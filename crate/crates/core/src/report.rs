//! Machine-readable outcome records shared by every command-line task.
//!
//! A [`Report`] captures one verification or computation: what ran, at which
//! level, with which parameters, whether it passed, and — on failure — the
//! first witnesses of disagreement with both sides serialized.  Reports are
//! plain data: they serialize to JSON losslessly and deterministically
//! (object keys are emitted in sorted order), so fixed inputs always produce
//! byte-identical output.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

/// Schema version stamped into every report.
pub const SCHEMA_VERSION: u32 = 1;

/// Overall outcome of a task.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    /// Every checked instance agreed.
    Pass,
    /// At least one instance disagreed; see `counterexamples`.
    Fail,
    /// Nothing disagreed, but the task surfaced an anomaly or a documented
    /// ambiguity that a reader should inspect.
    Flagged,
}

/// One task outcome.  `details` holds per-instance rows in a stable order;
/// `counterexamples` holds the first failing instances with both computed
/// values, and is empty exactly when the status is `Pass`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub task: String,
    pub level: u32,
    #[serde(default, skip_serializing_if = "Map::is_empty")]
    pub parameters: Map<String, Value>,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub details: Vec<Value>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub counterexamples: Vec<Value>,
    pub wall_ms: u64,
}

impl Report {
    /// Fresh passing report; callers add parameters and findings.
    pub fn new(task: impl Into<String>, level: u32) -> Self {
        Report {
            schema: SCHEMA_VERSION,
            task: task.into(),
            level,
            parameters: Map::new(),
            status: Status::Pass,
            details: Vec::new(),
            counterexamples: Vec::new(),
            wall_ms: 0,
        }
    }

    /// Records a named parameter (builder style).
    pub fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.parameters.insert(key.to_string(), value.into());
        self
    }

    /// Appends a per-instance detail row.
    pub fn detail(&mut self, row: Value) {
        self.details.push(row);
    }

    /// Records a failing instance and downgrades the status to `Fail`.
    pub fn fail(&mut self, counterexample: Value) {
        self.counterexamples.push(counterexample);
        self.status = Status::Fail;
    }

    /// Marks the report flagged unless it already failed.
    pub fn flag(&mut self) {
        if self.status == Status::Pass {
            self.status = Status::Flagged;
        }
    }

    /// Stamps the elapsed wall time (builder style, called last).
    pub fn finish(mut self, started: Instant) -> Self {
        self.wall_ms = started.elapsed().as_millis() as u64;
        self
    }

    pub fn pass(&self) -> bool {
        self.status == Status::Pass
    }

    /// Structural invariant: a passing report carries no counterexamples,
    /// and any counterexample forces a failing status.
    pub fn well_formed(&self) -> bool {
        match self.status {
            Status::Fail => !self.counterexamples.is_empty(),
            Status::Pass | Status::Flagged => self.counterexamples.is_empty(),
        }
    }
}

/// Process exit code for a batch of reports: 0 if everything passed, 1 if
/// anything failed, 3 if nothing failed but something was flagged.  (Code 2
/// is reserved for command-line usage errors and never derives from
/// reports.)
pub fn exit_code(reports: &[Report]) -> i32 {
    if reports.iter().any(|r| r.status == Status::Fail) {
        1
    } else if reports.iter().any(|r| r.status == Status::Flagged) {
        3
    } else {
        0
    }
}

/// Serializes a batch as a JSON array (pretty, trailing newline).
pub fn to_json_string(reports: &[Report]) -> String {
    let mut s = serde_json::to_string_pretty(reports).expect("report serialization");
    s.push('\n');
    s
}

/// Parses a batch back from JSON.
pub fn from_json_str(s: &str) -> crate::Result<Vec<Report>> {
    Ok(serde_json::from_str(s)?)
}
