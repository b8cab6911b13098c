use super::parse::StructuredResponse;

/// True when any contiguous n-gram repeats back-to-back more than
/// `max_repeats` times.
fn ngram_loops<T: PartialEq>(tokens: &[T], n: usize, max_repeats: usize) -> bool {
    debug_assert!(n >= 2);
    if tokens.len() < n * (max_repeats + 1) {
        return false;
    }
    for start in 0..tokens.len().saturating_sub(n) {
        let mut repeats = 1;
        let mut pos = start + n;
        while pos + n <= tokens.len() && tokens[pos..pos + n] == tokens[start..start + n] {
            repeats += 1;
            if repeats > max_repeats {
                return true;
            }
            pos += n;
        }
    }
    false
}

fn region_repetitive(text: &str, n: usize, max_repeats: usize) -> bool {
    // Whitespace-delimited tokens catch looping phrases; character tokens
    // catch unspaced digit or symbol runs. Either granularity trips the
    // detector.
    let words: Vec<&str> = text.split_whitespace().collect();
    if ngram_loops(&words, n, max_repeats) {
        return true;
    }
    let chars: Vec<char> = text.chars().collect();
    ngram_loops(&chars, n, max_repeats)
}

/// Stage-one repetition filter. Both the thinking and the answer region
/// are checked independently: repetition that starts in the thinking
/// region is rejected even when the answer region is still clean.
pub fn repetition_check(resp: &StructuredResponse, n: usize, max_repeats: usize) -> bool {
    region_repetitive(&resp.think_text, n, max_repeats)
        || region_repetitive(&resp.answer_text, n, max_repeats)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn resp(think: &str, answer: &str) -> StructuredResponse {
        StructuredResponse {
            think_text: think.to_string(),
            answer_text: answer.to_string(),
            well_formed: true,
        }
    }

    #[test]
    fn alternating_bigram_loop_detected() {
        // "a b" repeats 5 times consecutively; 5 > 3.
        let r = resp("", "a b a b a b a b a b");
        assert!(repetition_check(&r, 2, 3));
        // With a higher tolerance it passes: 5 is not > 5.
        assert!(!repetition_check(&r, 2, 5));
    }

    #[test]
    fn non_repeating_text_passes() {
        let r = resp("first add the tens then the units", "the sum is 42");
        assert!(!repetition_check(&r, 3, 4));
    }

    #[test]
    fn think_only_repetition_is_enough() {
        let loopy = "go go go go go go go go go go go go";
        let r = resp(loopy, "clean answer 7");
        assert!(repetition_check(&r, 2, 4));
        let r = resp("clean reasoning", loopy);
        assert!(repetition_check(&r, 2, 4), "answer region is checked the same way");
    }

    #[test]
    fn unspaced_character_runs_detected() {
        let r = resp("", "373737373737373737");
        assert!(repetition_check(&r, 2, 4));
    }

    #[test]
    fn short_text_never_loops() {
        let r = resp("ok", "42");
        assert!(!repetition_check(&r, 3, 4));
    }
}
