use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One per-step metrics row. Scheduler counters are merged into the same
/// CSV so a run produces a single time series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub step: u64,
    pub stage: usize,
    pub mean_reward: f64,
    pub policy_entropy: f64,
    pub mean_response_len: f64,
    pub raw_generated: u64,
    pub filtered_out: u64,
    pub consumed: u64,
    pub buffered: u64,
    pub oversample_ratio: f64,
    pub buffer_size: u64,
    pub objective_value: f64,
}

pub const METRICS_HEADER: &str = "step,stage,mean_reward,policy_entropy,mean_response_len,raw_generated,filtered_out,consumed,buffered,oversample_ratio,buffer_size,objective_value";

impl MetricsRow {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.step,
            self.stage,
            self.mean_reward,
            self.policy_entropy,
            self.mean_response_len,
            self.raw_generated,
            self.filtered_out,
            self.consumed,
            self.buffered,
            self.oversample_ratio,
            self.buffer_size,
            self.objective_value,
        )
    }
}

/// Render the full metrics CSV. Float fields print in shortest-roundtrip
/// form, so identical runs produce byte-identical files.
pub fn metrics_csv(rows: &[MetricsRow]) -> String {
    let mut out = String::from(METRICS_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.csv_line());
        out.push('\n');
    }
    out
}

/// Validate the row invariants: steps strictly increase and stages never
/// go backward.
pub fn check_rows(rows: &[MetricsRow]) -> Result<()> {
    for pair in rows.windows(2) {
        if pair[1].step <= pair[0].step {
            return Err(Error::invariant(format!(
                "metrics steps must strictly increase: {} then {}",
                pair[0].step, pair[1].step
            )));
        }
        if pair[1].stage < pair[0].stage {
            return Err(Error::invariant("metrics stages must not go backward"));
        }
    }
    Ok(())
}
