use unicode_normalization::UnicodeNormalization;

/// Canonical text form used for all duplicate detection: lowercase,
/// Unicode NFC, single-space separated. Idempotent.
pub fn normalize_text(raw: &str) -> String {
    let lowered = raw.to_lowercase();
    let composed: String = lowered.nfc().collect();
    composed.split_whitespace().collect::<Vec<_>>().join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn collapses_whitespace() {
        assert_eq!(normalize_text("  2 + 2  "), "2 + 2");
    }

    #[test]
    fn folds_case() {
        assert_eq!(normalize_text("ABC"), "abc");
    }

    #[test]
    fn composes_to_nfc() {
        // "e" + combining acute accent must compose to the precomposed form,
        // byte-identical to an independently normalized reference string.
        let decomposed = "x\u{0065}\u{0301}1";
        let reference: String = decomposed.nfc().collect();
        assert_eq!(normalize_text(decomposed), reference);
        assert_eq!(normalize_text(decomposed), "x\u{00e9}1");
        // Fullwidth characters are preserved (NFC, not NFKC).
        let fullwidth = "x\u{ff1d}1";
        let reference: String = fullwidth.nfc().collect();
        assert_eq!(normalize_text(fullwidth), reference);
    }

    #[test]
    fn empty_input_is_empty() {
        assert_eq!(normalize_text(""), "");
        assert_eq!(normalize_text("   "), "");
    }

    proptest! {
        #[test]
        fn idempotent(s in "\\PC{0,64}") {
            let once = normalize_text(&s);
            prop_assert_eq!(normalize_text(&once), once);
        }
    }
}
