//! Group statistics, advantage estimators, and the clipped token-level
//! surrogate objective.

mod advantage;
mod entropy_reg;
mod objective;

pub use advantage::{
    estimator_by_name, estimator_names, AdvantageAssignment, AdvantageEstimator, GrpoEstimator,
    PshwEstimator,
};
pub use entropy_reg::{entropy_penalty_sign, targeted_entropy_penalty};
pub use objective::{batch_objective, clipped_term, GroupTerms, ObjectiveValue, OutputTerms};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The intercept of the hardness weight D(q) = alpha * mu + 1.256. With
/// the default alpha = -0.256 the easiest admissible groups (mu -> 1) get
/// weight exactly 1 and the hardest (mu -> -1) get 1.512.
pub const HARDNESS_INTERCEPT: f64 = 1.256;

/// Default hardness slope.
pub const DEFAULT_ALPHA: f64 = -0.256;

/// Objective and regularization constants, surfaced as `opt.*` run-config
/// keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClipConfig {
    /// Lower clip margin: ratios below 1 - eps_low stop contributing
    /// gradient.
    pub eps_low: f64,
    /// Upper clip margin, decoupled from eps_low.
    pub eps_high: f64,
    /// Entropy level the targeted penalty pulls toward, in nats.
    pub entropy_target: f64,
    /// Penalty strength; 0 disables entropy regularization.
    pub entropy_coeff: f64,
    /// Hardness slope of D(q).
    pub alpha: f64,
    /// Advantage estimator name: "pshw" or "grpo".
    pub advantage: String,
    /// Divide each output's token sum by its length. Kept for the
    /// stage-1 objective; the hardness-weighted stages must run without
    /// length normalization.
    pub length_normalize: bool,
    /// Reference-policy KL penalty strength. Off by default.
    pub kl_coeff: f64,
}

impl Default for ClipConfig {
    fn default() -> Self {
        ClipConfig {
            eps_low: 0.2,
            eps_high: 0.28,
            entropy_target: 0.55,
            entropy_coeff: 0.001,
            alpha: DEFAULT_ALPHA,
            advantage: "pshw".to_string(),
            length_normalize: false,
            kl_coeff: 0.0,
        }
    }
}

impl ClipConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps_low > 0.0) || !(self.eps_high > 0.0) {
            return Err(Error::config("eps_low and eps_high must be > 0"));
        }
        if self.entropy_coeff < 0.0 {
            return Err(Error::config("entropy_coeff must be >= 0"));
        }
        if self.kl_coeff < 0.0 {
            return Err(Error::config("kl_coeff must be >= 0"));
        }
        estimator_by_name(&self.advantage)?;
        Ok(())
    }
}

/// Reward statistics of one rollout group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupStats {
    rewards: Vec<f64>,
    mu: f64,
    num_correct: usize,
}

impl GroupStats {
    /// Build from binary rewards. The mean is the exact integer reward sum
    /// divided once by the group size.
    pub fn from_rewards(rewards: &[f64]) -> Result<Self> {
        if rewards.len() < 2 {
            return Err(Error::invariant(format!(
                "group statistics need at least 2 rewards, got {}",
                rewards.len()
            )));
        }
        let mut sum: i64 = 0;
        let mut num_correct = 0usize;
        for &r in rewards {
            if r == 1.0 {
                sum += 1;
                num_correct += 1;
            } else if r == -1.0 {
                sum -= 1;
            } else {
                return Err(Error::invariant(format!("reward {r} outside {{-1, +1}}")));
            }
        }
        Ok(GroupStats {
            rewards: rewards.to_vec(),
            mu: sum as f64 / rewards.len() as f64,
            num_correct,
        })
    }

    pub fn g(&self) -> usize {
        self.rewards.len()
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn num_correct(&self) -> usize {
        self.num_correct
    }

    pub fn rewards(&self) -> &[f64] {
        &self.rewards
    }

    /// The admission constraint: not all correct, not all wrong.
    pub fn is_mixed(&self) -> bool {
        self.num_correct > 0 && self.num_correct < self.g()
    }
}

/// Hardness weight D(q) = alpha * mu + 1.256: strictly decreasing in the
/// group mean reward for negative alpha, so harder questions (relative to
/// the current policy) scale their advantages up.
pub fn hardness_weight(mu: f64, alpha: f64) -> f64 {
    debug_assert!((-1.0..=1.0).contains(&mu), "group mean reward out of range");
    alpha * mu + HARDNESS_INTERCEPT
}
