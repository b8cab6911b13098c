//! The reference analytic policy: a linear softmax over sparse hashed
//! context features.
//!
//! Everything the optimizer needs — per-token log-probabilities, entropy,
//! and gradients — has a closed form here, so the training loop can be
//! checked against finite differences exactly. Any autoregressive model
//! exposing the same operations can be substituted.

mod checkpoint;
mod features;
mod gradients;
mod sample;
mod softmax;

pub use checkpoint::PolicyCheckpoint;
pub use features::{FeatureSpace, TokenContext};
pub use gradients::{analytic_gradients, GradTerm};
pub use sample::{importance_ratios, sample_group, sample_rollout, sample_rollout_with, Rollout, SamplingOptions};
pub use softmax::{context_entropy, policy_entropy, token_distribution, token_logprobs};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vocab::{Token, Vocab};

/// Weight matrix of the linear-softmax policy plus a version counter that
/// distinguishes the sampling-time snapshot from updated parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyParams {
    weights: Vec<f64>, // row-major [num_features x vocab_size]
    num_features: usize,
    vocab_size: usize,
    version: u64,
}

impl PolicyParams {
    pub fn zeros(num_features: usize, vocab_size: usize) -> Self {
        PolicyParams {
            weights: vec![0.0; num_features * vocab_size],
            num_features,
            vocab_size,
            version: 0,
        }
    }

    pub fn num_features(&self) -> usize {
        self.num_features
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    pub fn version(&self) -> u64 {
        self.version
    }

    pub fn weight(&self, feature: usize, token: usize) -> f64 {
        self.weights[feature * self.vocab_size + token]
    }

    /// Direct weight write, used to construct initial policies. Does not
    /// bump the version: initialization is not a training update.
    pub fn set_weight(&mut self, feature: usize, token: usize, value: f64) {
        assert!(value.is_finite(), "policy weights must stay finite");
        self.weights[feature * self.vocab_size + token] = value;
    }

    pub fn add_weight(&mut self, feature: usize, token: usize, delta: f64) {
        let w = &mut self.weights[feature * self.vocab_size + token];
        *w += delta;
        assert!(w.is_finite(), "policy weights must stay finite");
    }

    /// Gradient-ascent step `w += scale * grad`; increments the version.
    pub fn apply_update(&mut self, grad: &[f64], scale: f64) -> Result<()> {
        if grad.len() != self.weights.len() {
            return Err(Error::invariant(format!(
                "gradient has {} entries, parameters have {}",
                grad.len(),
                self.weights.len()
            )));
        }
        for (w, g) in self.weights.iter_mut().zip(grad) {
            *w += scale * g;
            if !w.is_finite() {
                return Err(Error::invariant("parameter update produced non-finite weight"));
            }
        }
        self.version += 1;
        Ok(())
    }

    pub(crate) fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub(crate) fn from_parts(
        weights: Vec<f64>,
        num_features: usize,
        vocab_size: usize,
        version: u64,
    ) -> Result<Self> {
        if weights.len() != num_features * vocab_size {
            return Err(Error::data("checkpoint weight count does not match dimensions"));
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::data("checkpoint contains non-finite weights"));
        }
        Ok(PolicyParams {
            weights,
            num_features,
            vocab_size,
            version,
        })
    }
}

/// Initialization strategies for the reference policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolicyInit {
    /// All-zero weights: the uniform policy.
    Zeros,
    /// Template-primed weights: the response grammar (close the think
    /// region, emit digits, stop) starts plausible while answer content
    /// stays near-uniform. Plays the role of a base model that already
    /// follows the output format but has not learned the task.
    Templated,
}

impl PolicyInit {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "zeros" => Ok(PolicyInit::Zeros),
            "templated" => Ok(PolicyInit::Templated),
            other => Err(Error::config(format!("unknown policy init {other:?}"))),
        }
    }

    pub fn build(self, fs: &FeatureSpace, vocab: &Vocab) -> PolicyParams {
        match self {
            PolicyInit::Zeros => PolicyParams::zeros(fs.num_features(), fs.vocab_size()),
            PolicyInit::Templated => templated_init(fs, vocab),
        }
    }
}

/// Template-primed initial weights; see [`PolicyInit::Templated`].
pub fn templated_init(fs: &FeatureSpace, vocab: &Vocab) -> PolicyParams {
    let mut params = PolicyParams::zeros(fs.num_features(), fs.vocab_size());
    let tc = vocab.think_close();
    let eos = vocab.eos();

    for tok in 0..vocab.size() as u16 {
        let f = fs.offset_feature(1, Some(Token(tok)));
        // Mild global pressure to close the think region rather than
        // ramble to the length cap.
        params.add_weight(f, tc.index(), 1.0);
        if vocab.is_digit(Token(tok)) {
            // After a digit: favor stopping, allow another digit.
            params.add_weight(f, eos.index(), 1.0);
            for d in 0..10 {
                params.add_weight(f, d, 0.5);
            }
        }
    }
    // Right after the think region closes, favor starting the answer with
    // a digit and cancel the global close-marker pressure: a second close
    // marker would be malformed.
    let f_tc = fs.offset_feature(1, Some(tc));
    params.set_weight(f_tc, tc.index(), 0.0);
    for d in 0..10 {
        params.add_weight(f_tc, d, 1.2);
    }
    // A stray think-open anywhere in the response is malformed too.
    for tok in 0..vocab.size() as u16 {
        let f = fs.offset_feature(1, Some(Token(tok)));
        params.add_weight(f, vocab.think_open().index(), -1.0);
    }
    params
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn version_increments_on_update() {
        let mut p = PolicyParams::zeros(4, 3);
        assert_eq!(p.version(), 0);
        let grad = vec![0.1; 12];
        p.apply_update(&grad, 1.0).unwrap();
        assert_eq!(p.version(), 1);
        assert!((p.weight(0, 0) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn non_finite_update_rejected() {
        let mut p = PolicyParams::zeros(2, 2);
        let grad = vec![f64::INFINITY, 0.0, 0.0, 0.0];
        assert!(p.apply_update(&grad, 1.0).is_err());
    }

    #[test]
    fn init_parse() {
        assert_eq!(PolicyInit::parse("zeros").unwrap(), PolicyInit::Zeros);
        assert_eq!(PolicyInit::parse("templated").unwrap(), PolicyInit::Templated);
        assert!(PolicyInit::parse("xavier").is_err());
    }
}
