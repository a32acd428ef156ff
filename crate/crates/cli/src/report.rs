//! The JSON report written by every subcommand.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const SCHEMA_VERSION: &str = "1.0.0";

/// Top-level report. Everything except `timings` is a pure function of the
/// flags and the seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: String,
    pub command: String,
    /// Effective configuration after merging the config file and flags.
    pub config: Value,
    pub results: Value,
    pub timings: Timings,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub total_ms: f64,
}

impl RunReport {
    pub fn new(command: &str, config: Value, results: Value, seed: u64, total_ms: f64) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.to_string(),
            command: command.to_string(),
            config,
            results,
            timings: Timings { total_ms },
            seed,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.to_json() + "\n")
    }
}

/// Report with the timings zeroed, for determinism comparisons.
pub fn without_timings(mut report: RunReport) -> RunReport {
    report.timings.total_ms = 0.0;
    report
}
