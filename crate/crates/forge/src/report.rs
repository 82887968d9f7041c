//! Machine-readable run reports. See `docs/report.md` for the schema.

use std::time::Duration;

use albert_core::Q;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::config::RunConfig;

pub const SCHEMA_VERSION: u32 = 1;

/// Always `"p/q"`, also for integers.
pub fn rat(q: &Q) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub fn rats(v: &[Q]) -> Vec<String> {
    v.iter().map(rat).collect()
}

pub fn rats_value(v: &[Q]) -> Value {
    Value::from(rats(v))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckRecord {
    pub id: String,
    pub structure: String,
    pub status: Status,
    pub evaluations: usize,
    pub witness: Option<Vec<String>>,
    pub detail: Option<String>,
    pub data: Map<String, Value>,
    pub elapsed_ms: f64,
}

impl CheckRecord {
    pub fn new(id: impl Into<String>, structure: impl Into<String>) -> Self {
        CheckRecord {
            id: id.into(),
            structure: structure.into(),
            status: Status::Pass,
            evaluations: 0,
            witness: None,
            detail: None,
            data: Map::new(),
            elapsed_ms: 0.0,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn fail(mut self, detail: impl Into<String>, witness: Option<&[Q]>) -> Self {
        self.status = Status::Fail;
        self.detail = Some(detail.into());
        self.witness = witness.map(rats);
        self
    }

    /// Fails unless `ok`; keeps the first failure.
    pub fn require(self, ok: bool, detail: impl Into<String>) -> Self {
        if ok || !self.passed() {
            self
        } else {
            self.fail(detail, None)
        }
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.data.insert(key.to_string(), value.into());
        self
    }

    pub fn evaluated(mut self, n: usize) -> Self {
        self.evaluations = n;
        self
    }

    pub fn timed(mut self, d: Duration) -> Self {
        self.elapsed_ms = d.as_secs_f64() * 1e3;
        self
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub seed: Option<u64>,
    pub trials: usize,
    pub config: RunConfig,
    pub checks: Vec<CheckRecord>,
    pub summary: Summary,
    pub elapsed_ms: f64,
}

impl Report {
    pub fn new(command: &str, seed: Option<u64>, trials: usize, config: RunConfig, checks: Vec<CheckRecord>, elapsed: Duration) -> Self {
        let passed = checks.iter().filter(|c| c.passed()).count();
        Report {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            seed,
            trials,
            config,
            summary: Summary {
                total: checks.len(),
                passed,
                failed: checks.len() - passed,
            },
            checks,
            elapsed_ms: elapsed.as_secs_f64() * 1e3,
        }
    }

    pub fn passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
