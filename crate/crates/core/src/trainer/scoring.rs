use crate::corpus::PromptSample;
use crate::error::Result;
use crate::policy::Rollout;
use crate::reward::{two_stage_reward, FilterReason, RewardConfig, RewardRecord, Verifier};
use crate::vocab::Vocab;

/// Score one rollout against its task.
///
/// Length-capped rollouts never contain a complete answer region, so they
/// are treated as format failures without rendering: reward -1, filtered.
/// Complete rollouts are rendered behind the template's opening think
/// marker and scored by the two-stage reward.
pub fn score_rollout(
    vocab: &Vocab,
    sample: &PromptSample,
    rollout: &Rollout,
    verifier: &dyn Verifier,
    cfg: &RewardConfig,
) -> Result<RewardRecord> {
    if rollout.truncated {
        return Ok(RewardRecord {
            reward: -1.0,
            filtered: true,
            filter_reason: FilterReason::Format,
        });
    }
    let raw = format!("<think>{}", vocab.render(&rollout.tokens));
    two_stage_reward(&raw, &sample.question, &sample.answer, verifier, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{QType, Source};
    use crate::reward::RuleVerifier;
    use crate::vocab::Token;

    fn sample() -> PromptSample {
        PromptSample {
            id: "t".into(),
            question: "2+3=?".into(),
            answer: "5".into(),
            source: Source::Synthetic,
            qtype: QType::Calculation,
        }
    }

    #[test]
    fn truncated_rollouts_fail_format() {
        let vocab = Vocab::default();
        let r = Rollout {
            tokens: vec![Token(5)],
            logprobs_old: vec![-0.1],
            truncated: true,
        };
        let rec = score_rollout(&vocab, &sample(), &r, &RuleVerifier, &RewardConfig::default()).unwrap();
        assert_eq!(rec.reward, -1.0);
        assert_eq!(rec.filter_reason, FilterReason::Format);
    }

    #[test]
    fn complete_correct_rollout_scores_positive() {
        let vocab = Vocab::default();
        // Generated tokens "</think>5<eos>" follow the template's "<think>".
        let tokens = vec![vocab.think_close(), Token(5), vocab.eos()];
        let r = Rollout {
            logprobs_old: vec![-0.1; tokens.len()],
            tokens,
            truncated: false,
        };
        let rec = score_rollout(&vocab, &sample(), &r, &RuleVerifier, &RewardConfig::default()).unwrap();
        assert_eq!(rec.reward, 1.0);
        assert!(!rec.filtered);
    }

    #[test]
    fn wrong_answer_scores_negative() {
        let vocab = Vocab::default();
        let tokens = vec![vocab.think_close(), Token(7), vocab.eos()];
        let r = Rollout {
            logprobs_old: vec![-0.1; tokens.len()],
            tokens,
            truncated: false,
        };
        let rec = score_rollout(&vocab, &sample(), &r, &RuleVerifier, &RewardConfig::default()).unwrap();
        assert_eq!(rec.reward, -1.0);
        assert!(!rec.filtered);
    }
}
