use std::time::Duration;

use serde::Serialize;
use serde_json::Value;

/// Machine-readable result of one CLI command. Timing is kept out of the
/// JSON so that reports are byte-identical across runs; it goes to stderr.
#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub seed: u64,
    pub decision: Option<bool>,
    pub estimate: Option<f64>,
    pub classical_oracle: Option<Value>,
    pub tolerance: Option<f64>,
    pub pass: bool,
    #[serde(skip)]
    pub timing: Duration,
    pub ancilla_count: Option<usize>,
    pub details: Value,
}

impl RunReport {
    pub fn new(command: &str, seed: u64) -> Self {
        RunReport {
            command: command.into(),
            seed,
            decision: None,
            estimate: None,
            classical_oracle: None,
            tolerance: None,
            pass: true,
            timing: Duration::ZERO,
            ancilla_count: None,
            details: Value::Null,
        }
    }

    /// Human-readable table for stderr.
    pub fn table(&self) -> String {
        let opt = |v: Option<String>| v.unwrap_or_else(|| "-".into());
        let rows = [
            ("command", self.command.clone()),
            ("seed", self.seed.to_string()),
            ("decision", opt(self.decision.map(|d| if d { "YES".into() } else { "NO".into() }))),
            ("estimate", opt(self.estimate.map(|e| format!("{e:.6}")))),
            ("oracle", opt(self.classical_oracle.as_ref().map(|v| v.to_string()))),
            ("tolerance", opt(self.tolerance.map(|t| format!("{t:e}")))),
            ("pass", self.pass.to_string()),
            ("ancillas", opt(self.ancilla_count.map(|a| a.to_string()))),
            ("time", format!("{:.1} ms", self.timing.as_secs_f64() * 1e3)),
        ];
        rows.iter().map(|(k, v)| format!("{k:>10}  {v}\n")).collect()
    }
}
