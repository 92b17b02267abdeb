//! Machine-readable run reports.
//!
//! Reports are plain JSON with a schema version; rerunning a command with
//! the echoed `config` reproduces the `outputs` section bit for bit (only
//! `duration_ms` varies between runs).

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub command: String,
    pub config: Value,
    pub seeds: Vec<u64>,
    pub outputs: Value,
    pub warnings: Vec<String>,
    pub duration_ms: f64,
}

impl RunReport {
    pub fn new(
        command: &str,
        config: impl Serialize,
        seeds: Vec<u64>,
        outputs: impl Serialize,
        warnings: Vec<String>,
        started: std::time::Instant,
    ) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            config: serde_json::to_value(config).expect("config serializes"),
            seeds,
            outputs: serde_json::to_value(outputs).expect("outputs serialize"),
            warnings,
            duration_ms: started.elapsed().as_secs_f64() * 1e3,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}
