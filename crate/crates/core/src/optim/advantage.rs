use super::{hardness_weight, ClipConfig, GroupStats};
use crate::error::{Error, Result};

/// Per-output advantages for one group. The value applies uniformly to
/// every token of its output.
#[derive(Debug, Clone, PartialEq)]
pub struct AdvantageAssignment {
    pub per_output: Vec<f64>,
}

/// A group-relative advantage estimator. Estimators are registered by
/// name and selected from the run config, so stages can swap strategies
/// without touching the training loop.
pub trait AdvantageEstimator: Send + Sync {
    fn name(&self) -> &'static str;
    fn assign(&self, stats: &GroupStats, cfg: &ClipConfig) -> Result<AdvantageAssignment>;
}

/// Hardness-weighted estimator: advantage (R_i - mu) * D(q) with
/// D(q) = alpha * mu + 1.256. Requires a mixed group; degenerate groups
/// must be filtered out before advantage computation.
pub struct PshwEstimator;

impl AdvantageEstimator for PshwEstimator {
    fn name(&self) -> &'static str {
        "pshw"
    }

    fn assign(&self, stats: &GroupStats, cfg: &ClipConfig) -> Result<AdvantageAssignment> {
        if !stats.is_mixed() {
            return Err(Error::invariant(format!(
                "degenerate group reached advantage computation ({} of {} correct)",
                stats.num_correct(),
                stats.g()
            )));
        }
        let g = stats.g() as i64;
        let sum: i64 = 2 * stats.num_correct() as i64 - g;
        let d = hardness_weight(stats.mu(), cfg.alpha);
        // R_i - mu = (R_i * G - sum) / G with integer numerators, whose
        // total is exactly zero; the float advantages inherit that balance
        // up to rounding.
        let scale = d / g as f64;
        let per_output = stats
            .rewards()
            .iter()
            .map(|&r| {
                let numer = if r > 0.0 { g - sum } else { -g - sum };
                numer as f64 * scale
            })
            .collect();
        Ok(AdvantageAssignment { per_output })
    }
}

/// Normalized group-relative estimator: (R_i - mu) / sigma with the
/// population standard deviation. Undefined when all rewards are equal.
pub struct GrpoEstimator;

impl AdvantageEstimator for GrpoEstimator {
    fn name(&self) -> &'static str {
        "grpo"
    }

    fn assign(&self, stats: &GroupStats, _cfg: &ClipConfig) -> Result<AdvantageAssignment> {
        let mu = stats.mu();
        let g = stats.g() as f64;
        let var = stats.rewards().iter().map(|r| (r - mu) * (r - mu)).sum::<f64>() / g;
        let sigma = var.sqrt();
        if sigma == 0.0 {
            return Err(Error::invariant(
                "group with zero reward deviation reached advantage computation",
            ));
        }
        Ok(AdvantageAssignment {
            per_output: stats.rewards().iter().map(|r| (r - mu) / sigma).collect(),
        })
    }
}

/// Registered estimator strategies.
pub fn estimator_names() -> &'static [&'static str] {
    &["pshw", "grpo"]
}

/// Look up an advantage estimator by name.
pub fn estimator_by_name(name: &str) -> Result<Box<dyn AdvantageEstimator>> {
    match name {
        "pshw" => Ok(Box::new(PshwEstimator)),
        "grpo" => Ok(Box::new(GrpoEstimator)),
        other => Err(Error::config(format!(
            "unknown advantage estimator {other:?}; known: {}",
            estimator_names().join(", ")
        ))),
    }
}
