use std::sync::Arc;

use super::extract::{answers_equal, canonical_answer, extract_answer};
use crate::error::{Error, Result};

/// Stage-two correctness check. Implementations must be deterministic for
/// a fixed input so runs stay reproducible; a plugin failure is an error,
/// never a score.
pub trait Verifier: Send + Sync {
    fn name(&self) -> &'static str;
    fn verify(&self, question: &str, gold: &str, answer_text: &str) -> Result<bool>;
}

/// Rule-based verification: extract the final boxed-or-last-number
/// expression, canonicalize both sides, compare (exact for rationals,
/// 1e-9 relative for decimals). An unparseable answer is wrong, not an
/// error.
pub fn verify_answer_rule(answer_text: &str, gold: &str) -> Result<bool> {
    if gold.trim().is_empty() {
        return Err(Error::config("gold answer must be nonempty"));
    }
    let Some(expr) = extract_answer(answer_text) else {
        return Ok(false);
    };
    Ok(answers_equal(&canonical_answer(&expr), &canonical_answer(gold)))
}

/// The default rule-based verifier.
pub struct RuleVerifier;

impl Verifier for RuleVerifier {
    fn name(&self) -> &'static str {
        "rule"
    }

    fn verify(&self, _question: &str, gold: &str, answer_text: &str) -> Result<bool> {
        verify_answer_rule(answer_text, gold)
    }
}

/// External grader contract for answers a rule cannot score: given the
/// question, the gold answer, and the full response text, return a
/// verdict. Implementations own their transport, timeouts, and retries;
/// they must be deterministic for a fixed input.
pub trait Judge: Send + Sync {
    fn judge(&self, question: &str, gold: &str, response: &str) -> Result<bool>;
}

/// Adapter exposing any [`Judge`] as a [`Verifier`].
pub struct JudgeVerifier {
    judge: Arc<dyn Judge>,
}

impl JudgeVerifier {
    pub fn new(judge: Arc<dyn Judge>) -> Self {
        JudgeVerifier { judge }
    }
}

impl Verifier for JudgeVerifier {
    fn name(&self) -> &'static str {
        "judge"
    }

    fn verify(&self, question: &str, gold: &str, answer_text: &str) -> Result<bool> {
        self.judge.judge(question, gold, answer_text)
    }
}

/// Deterministic stand-in judge for tests and offline runs: grades with
/// the same rule-based comparison, so its verdicts are reproducible.
pub struct MockJudge;

impl Judge for MockJudge {
    fn judge(&self, _question: &str, gold: &str, response: &str) -> Result<bool> {
        verify_answer_rule(response, gold)
    }
}

/// Registered verifier strategies.
pub fn verifier_names() -> &'static [&'static str] {
    &["rule", "judge"]
}

/// Resolve a verifier by name. The judge strategy needs an implementation
/// supplied by the caller; no network client ships by default.
pub fn make_verifier(name: &str, judge: Option<Arc<dyn Judge>>) -> Result<Box<dyn Verifier>> {
    match name {
        "rule" => Ok(Box::new(RuleVerifier)),
        "judge" => {
            let judge = judge.ok_or_else(|| {
                Error::config("verifier \"judge\" requires a judge implementation")
            })?;
            Ok(Box::new(JudgeVerifier::new(judge)))
        }
        other => Err(Error::config(format!(
            "unknown verifier {other:?}; known: {}",
            verifier_names().join(", ")
        ))),
    }
}
