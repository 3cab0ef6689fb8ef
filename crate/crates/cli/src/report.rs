use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::Serialize;

/// Outcome of one named battery.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub trials: usize,
    /// Infinite (`null` in JSON) when a trial failed outright.
    pub max_deviation: f64,
    pub pass: bool,
    pub wall_time_ms: f64,
}

impl Check {
    /// Runs `trials` trials; each yields a deviation, or `None` when the
    /// sampled instance falls outside the statement's hypotheses.
    pub fn run(name: &'static str, trials: usize, tol: f64, mut trial: impl FnMut(usize) -> Option<f64>) -> Check {
        let start = Instant::now();
        let mut counted = 0;
        let mut worst = 0.0f64;
        for i in 0..trials {
            if let Some(dev) = trial(i) {
                counted += 1;
                // NaN propagates as a failure
                worst = if dev.is_nan() { f64::INFINITY } else { worst.max(dev) };
            }
        }
        Check {
            name,
            trials: counted,
            max_deviation: worst,
            pass: worst <= tol,
            wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
        }
    }

    pub fn single(name: &'static str, deviation: f64, tol: f64, start: Instant) -> Check {
        Check {
            name,
            trials: 1,
            max_deviation: deviation,
            pass: deviation <= tol,
            wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: &'static str,
    pub config: serde_json::Value,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    pub pass: bool,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
}

impl Report {
    pub fn new(command: &'static str, config: serde_json::Value) -> Report {
        Report {
            command,
            config,
            checks: Vec::new(),
            result: None,
            warnings: Vec::new(),
            pass: true,
            timestamp: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
        }
    }

    pub fn push(&mut self, check: Check) {
        self.pass &= check.pass;
        self.checks.push(check);
    }
}
