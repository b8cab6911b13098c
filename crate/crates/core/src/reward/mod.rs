//! Two-stage reward: filter first, verify second.
//!
//! Stage one rejects responses that are malformed (think/answer template
//! violations) or contain repetitive text, in either the thinking or the
//! answer region. Only responses passing both filters reach the stage-two
//! correctness verifier, which maps to a binary reward of +1 or -1.

mod extract;
mod parse;
mod repetition;
mod verify;

pub use extract::{canonical_answer, extract_answer, CanonicalAnswer};
pub use parse::{parse_response, StructuredResponse};
pub use repetition::repetition_check;
pub use verify::{
    make_verifier, verifier_names, verify_answer_rule, Judge, JudgeVerifier, MockJudge,
    RuleVerifier, Verifier,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reward configuration keys surfaced in the run config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewardConfig {
    /// n-gram width of the repetition detector.
    pub ngram_n: usize,
    /// Maximum tolerated consecutive repeats of one n-gram.
    pub max_repeats: usize,
    /// Verifier strategy name: "rule" or "judge".
    pub verifier: String,
}

impl Default for RewardConfig {
    fn default() -> Self {
        RewardConfig {
            ngram_n: 3,
            max_repeats: 4,
            verifier: "rule".to_string(),
        }
    }
}

impl RewardConfig {
    pub fn validate(&self) -> Result<()> {
        if self.ngram_n < 2 {
            return Err(Error::config("reward.ngram_n must be >= 2"));
        }
        if self.max_repeats == 0 {
            return Err(Error::config("reward.max_repeats must be >= 1"));
        }
        Ok(())
    }
}

/// Why stage one rejected a response, if it did.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterReason {
    None,
    Format,
    Repetition,
}

/// Outcome of scoring one response.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RewardRecord {
    /// Binary reward, +1 or -1.
    pub reward: f64,
    pub filtered: bool,
    pub filter_reason: FilterReason,
}

impl RewardRecord {
    fn filtered(reason: FilterReason) -> Self {
        RewardRecord {
            reward: -1.0,
            filtered: true,
            filter_reason: reason,
        }
    }

    fn verified(correct: bool) -> Self {
        RewardRecord {
            reward: if correct { 1.0 } else { -1.0 },
            filtered: false,
            filter_reason: FilterReason::None,
        }
    }

    pub fn is_correct(&self) -> bool {
        self.reward > 0.0
    }
}

/// Score a raw response. Responses failing a stage-one filter never reach
/// the verifier and carry reward -1; a verifier plugin failure propagates
/// as a hard error rather than a score.
pub fn two_stage_reward(
    raw: &str,
    question: &str,
    gold: &str,
    verifier: &dyn Verifier,
    cfg: &RewardConfig,
) -> Result<RewardRecord> {
    let resp = parse_response(raw);
    if !resp.well_formed {
        return Ok(RewardRecord::filtered(FilterReason::Format));
    }
    if repetition_check(&resp, cfg.ngram_n, cfg.max_repeats) {
        return Ok(RewardRecord::filtered(FilterReason::Repetition));
    }
    let correct = verifier.verify(question, gold, &resp.answer_text)?;
    Ok(RewardRecord::verified(correct))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::atomic::{AtomicUsize, Ordering};

    struct CountingVerifier {
        calls: AtomicUsize,
        inner: RuleVerifier,
    }

    impl Verifier for CountingVerifier {
        fn name(&self) -> &'static str {
            "counting"
        }
        fn verify(&self, question: &str, gold: &str, answer_text: &str) -> Result<bool> {
            self.calls.fetch_add(1, Ordering::SeqCst);
            self.inner.verify(question, gold, answer_text)
        }
    }

    fn cfg() -> RewardConfig {
        RewardConfig::default()
    }

    #[test]
    fn correct_well_formed_response_scores_plus_one() {
        let v = RuleVerifier;
        let r = two_stage_reward("<think>easy</think>4", "2+2=?", "4", &v, &cfg()).unwrap();
        assert_eq!(r.reward, 1.0);
        assert!(!r.filtered);
        assert_eq!(r.filter_reason, FilterReason::None);
    }

    #[test]
    fn malformed_but_correct_content_is_rejected() {
        let v = RuleVerifier;
        // Correct value, but the think region never closes.
        let r = two_stage_reward("<think>4", "2+2=?", "4", &v, &cfg()).unwrap();
        assert_eq!(r.reward, -1.0);
        assert!(r.filtered);
        assert_eq!(r.filter_reason, FilterReason::Format);
    }

    #[test]
    fn well_formed_but_wrong_scores_minus_one_unfiltered() {
        let v = RuleVerifier;
        let r = two_stage_reward("<think>hmm</think>5", "2+2=?", "4", &v, &cfg()).unwrap();
        assert_eq!(r.reward, -1.0);
        assert!(!r.filtered);
        assert_eq!(r.filter_reason, FilterReason::None);
    }

    #[test]
    fn filtered_responses_never_reach_the_verifier() {
        let v = CountingVerifier {
            calls: AtomicUsize::new(0),
            inner: RuleVerifier,
        };
        let malformed = "<think>4";
        let repetitive = "<think>a b c a b c a b c a b c a b c a b c</think>4";
        two_stage_reward(malformed, "q", "4", &v, &cfg()).unwrap();
        two_stage_reward(repetitive, "q", "4", &v, &cfg()).unwrap();
        assert_eq!(v.calls.load(Ordering::SeqCst), 0);
        two_stage_reward("<think>fine</think>4", "q", "4", &v, &cfg()).unwrap();
        assert_eq!(v.calls.load(Ordering::SeqCst), 1);
    }

    #[test]
    fn reward_is_pure_and_binary() {
        let v = RuleVerifier;
        let inputs = [
            "<think>x</think>4",
            "<think>x</think>9",
            "<think>9",
            "<think>c c c c c c c c c c c c c c c</think>4",
        ];
        for raw in inputs {
            let a = two_stage_reward(raw, "q", "4", &v, &cfg()).unwrap();
            let b = two_stage_reward(raw, "q", "4", &v, &cfg()).unwrap();
            assert_eq!(a, b, "identical inputs must give identical records");
            assert!(a.reward == 1.0 || a.reward == -1.0);
            assert_eq!(a.filtered, a.filter_reason != FilterReason::None);
            if a.filtered {
                assert_eq!(a.reward, -1.0);
            }
        }
    }

    #[test]
    fn failing_verifier_is_a_hard_error() {
        struct Broken;
        impl Verifier for Broken {
            fn name(&self) -> &'static str {
                "broken"
            }
            fn verify(&self, _: &str, _: &str, _: &str) -> Result<bool> {
                Err(Error::Verifier("backend unreachable".into()))
            }
        }
        let res = two_stage_reward("<think>x</think>4", "q", "4", &Broken, &cfg());
        assert!(matches!(res, Err(Error::Verifier(_))));
    }
}
