/// A response split into its thinking and answer regions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructuredResponse {
    pub think_text: String,
    pub answer_text: String,
    pub well_formed: bool,
}

const OPEN: &str = "<think>";
const CLOSE: &str = "</think>";

/// Split a raw response on the think markers. Well-formed means exactly
/// one open marker, exactly one close marker, in that order; everything
/// between them is the thinking region and everything after the close
/// marker is the answer region.
pub fn parse_response(raw: &str) -> StructuredResponse {
    let malformed = StructuredResponse {
        think_text: String::new(),
        answer_text: String::new(),
        well_formed: false,
    };
    let close_positions: Vec<usize> = raw.match_indices(CLOSE).map(|(i, _)| i).collect();
    let open_positions: Vec<usize> = raw.match_indices(OPEN).map(|(i, _)| i).collect();
    if open_positions.len() != 1 || close_positions.len() != 1 {
        return malformed;
    }
    let (open, close) = (open_positions[0], close_positions[0]);
    if close < open {
        return malformed;
    }
    StructuredResponse {
        think_text: raw[open + OPEN.len()..close].to_string(),
        answer_text: raw[close + CLOSE.len()..].to_string(),
        well_formed: true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splits_think_and_answer() {
        let r = parse_response("<think>a</think>b");
        assert!(r.well_formed);
        assert_eq!(r.think_text, "a");
        assert_eq!(r.answer_text, "b");
    }

    #[test]
    fn missing_close_marker_is_malformed() {
        assert!(!parse_response("<think>abc").well_formed);
        assert!(!parse_response("abc</think>d").well_formed);
    }

    #[test]
    fn duplicated_or_reordered_markers_are_malformed() {
        // Any marker count other than exactly one of each fails.
        assert!(!parse_response("<think>a</think><think>b</think>c").well_formed);
        assert!(!parse_response("<think><think>a</think>b").well_formed);
        assert!(!parse_response("a</think><think>b").well_formed);
        assert!(!parse_response("<think>a</think>b</think>").well_formed);
    }

    #[test]
    fn empty_regions_are_still_well_formed() {
        let r = parse_response("<think></think>7");
        assert!(r.well_formed);
        assert_eq!(r.think_text, "");
        assert_eq!(r.answer_text, "7");
    }
}
