use super::{PromptSample, QType};

/// Heuristic question-type inference for samples without an explicit tag.
///
/// Pattern rules, checked in order:
/// 1. "prove"/"证明" marks a proof.
/// 2. true/false phrasing ("true or false", "true/false", "判断").
/// 3. Option markers "A." through "D." mark a choice question;
///    "select all"/"多选" upgrades it to multi-choice.
/// 4. "fill in the blank"/"填空" marks fill-in.
/// 5. Everything else is a calculation.
pub fn infer_qtype(question: &str) -> QType {
    let q = question.to_lowercase();
    if q.contains("prove") || q.contains("证明") {
        return QType::Proof;
    }
    if q.contains("true or false") || q.contains("true/false") || q.contains("判断") {
        return QType::TrueFalse;
    }
    let has_options = ["a.", "b.", "c.", "d."].iter().all(|m| q.contains(m))
        || ["a)", "b)", "c)", "d)"].iter().all(|m| q.contains(m));
    if has_options {
        if q.contains("select all") || q.contains("multiple answers") || q.contains("多选") {
            return QType::MultiChoice;
        }
        return QType::SingleChoice;
    }
    if q.contains("fill in the blank") || q.contains("填空") {
        return QType::FillIn;
    }
    QType::Calculation
}

/// Keep only samples whose type a rule-based verifier can score: choice,
/// true/false, and proof questions are dropped.
pub fn type_filter(corpus: Vec<PromptSample>) -> Vec<PromptSample> {
    corpus.into_iter().filter(|s| s.qtype.is_verifiable()).collect()
}
