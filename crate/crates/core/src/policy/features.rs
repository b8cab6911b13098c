use serde::{Deserialize, Serialize};

use crate::vocab::{Token, Vocab};

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn fnv_tokens(seed: u64, tokens: &[u16]) -> u64 {
    let mut h = FNV_OFFSET ^ seed.wrapping_mul(FNV_PRIME);
    for t in tokens {
        for b in t.to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(FNV_PRIME);
        }
    }
    h
}

/// Sparse feature vector of one decoding position. Extraction is a pure
/// function of (prompt, generated prefix), so contexts can be rebuilt or
/// cached freely.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TokenContext {
    pub features: Vec<(u32, f64)>,
}

impl TokenContext {
    /// Arbitrary sparse features, used by gradient checks and tests.
    pub fn from_features(features: Vec<(u32, f64)>) -> Self {
        TokenContext { features }
    }
}

/// Hashed context features for the linear-softmax policy:
///
/// - one feature per (window offset, token) for the last `window` tokens
///   of prompt-plus-prefix, with an explicit padding token at the start
///   of short sequences;
/// - one hashed conjunction of the whole window;
/// - one "prompt bucket" hashing the tail of the question (the prompt
///   with its trailing template marker stripped), active at every step.
///
/// The per-offset features carry local rules such as "close the think
/// region after the marker"; the window conjunction disambiguates
/// positions; the prompt bucket carries the question content the answer
/// depends on and is shared between any two questions with the same
/// computational tail, which is what lets a trained policy transfer to
/// held-out questions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSpace {
    vocab_size: usize,
    window: usize,
    conj_buckets: usize,
    prompt_buckets: usize,
    prompt_tail: usize,
    template_suffix: Option<Token>,
}

impl FeatureSpace {
    /// Default geometry over the task vocabulary.
    pub fn new(vocab: &Vocab) -> Self {
        FeatureSpace {
            vocab_size: vocab.size(),
            window: 3,
            conj_buckets: 4096,
            prompt_buckets: 4096,
            prompt_tail: 5,
            template_suffix: Some(vocab.think_open()),
        }
    }

    /// Custom geometry, used by tests and gradient checks that want a
    /// small parameter count.
    pub fn with_dims(
        vocab_size: usize,
        window: usize,
        conj_buckets: usize,
        prompt_buckets: usize,
        prompt_tail: usize,
        template_suffix: Option<Token>,
    ) -> Self {
        assert!(window >= 1 && vocab_size >= 2);
        FeatureSpace {
            vocab_size,
            window,
            conj_buckets,
            prompt_buckets,
            prompt_tail,
            template_suffix,
        }
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn num_features(&self) -> usize {
        self.window * (self.vocab_size + 1) + self.conj_buckets + self.prompt_buckets
    }

    /// Feature index of `token` observed `offset` positions back
    /// (1 = the most recent token). `None` is the padding slot.
    pub fn offset_feature(&self, offset: usize, token: Option<Token>) -> usize {
        debug_assert!(offset >= 1 && offset <= self.window);
        let slot = match token {
            Some(t) => {
                debug_assert!(t.index() < self.vocab_size);
                t.index()
            }
            None => self.vocab_size, // padding
        };
        (offset - 1) * (self.vocab_size + 1) + slot
    }

    /// Bucket feature index for a question tail; exposed so tests and
    /// oracle policies can address the same bucket the extractor uses.
    pub fn prompt_bucket_feature(&self, question: &[Token]) -> usize {
        let tail_start = question.len().saturating_sub(self.prompt_tail);
        let ids: Vec<u16> = question[tail_start..].iter().map(|t| t.0).collect();
        let base = self.window * (self.vocab_size + 1) + self.conj_buckets;
        base + (fnv_tokens(0x51, &ids) % self.prompt_buckets as u64) as usize
    }

    fn conj_feature(&self, window_ids: &[u16]) -> usize {
        let base = self.window * (self.vocab_size + 1);
        base + (fnv_tokens(0x17, window_ids) % self.conj_buckets as u64) as usize
    }

    /// Question tokens = prompt minus its trailing template marker.
    fn question_of<'a>(&self, prompt: &'a [Token]) -> &'a [Token] {
        match self.template_suffix {
            Some(suffix) if prompt.last() == Some(&suffix) => &prompt[..prompt.len() - 1],
            _ => prompt,
        }
    }

    /// Extract the feature vector at the next decoding position given the
    /// prompt and the generated prefix.
    pub fn context(&self, prompt: &[Token], prefix: &[Token]) -> TokenContext {
        let mut features = Vec::with_capacity(self.window + 2);
        let mut window_ids = Vec::with_capacity(self.window);
        let total = prompt.len() + prefix.len();
        for offset in 1..=self.window {
            let token = if offset <= total {
                let pos = total - offset;
                let t = if pos < prompt.len() {
                    prompt[pos]
                } else {
                    prefix[pos - prompt.len()]
                };
                Some(t)
            } else {
                None
            };
            window_ids.push(token.map_or(self.vocab_size as u16, |t| t.0));
            features.push((self.offset_feature(offset, token) as u32, 1.0));
        }
        features.push((self.conj_feature(&window_ids) as u32, 1.0));
        features.push((self.prompt_bucket_feature(self.question_of(prompt)) as u32, 1.0));
        TokenContext { features }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(ids: &[u16]) -> Vec<Token> {
        ids.iter().map(|&i| Token(i)).collect()
    }

    #[test]
    fn extraction_is_deterministic() {
        let vocab = Vocab::default();
        let fs = FeatureSpace::new(&vocab);
        let prompt = toks(&[2, 10, 3, 22]);
        let prefix = toks(&[23, 5]);
        assert_eq!(fs.context(&prompt, &prefix), fs.context(&prompt, &prefix));
    }

    #[test]
    fn window_sees_prompt_then_prefix() {
        let vocab = Vocab::default();
        let fs = FeatureSpace::new(&vocab);
        let prompt = toks(&[2, 10, 3, 22]);
        // Empty prefix: window is the prompt tail.
        let ctx = fs.context(&prompt, &[]);
        assert_eq!(ctx.features[0].0 as usize, fs.offset_feature(1, Some(Token(22))));
        assert_eq!(ctx.features[1].0 as usize, fs.offset_feature(2, Some(Token(3))));
        // One generated token shifts the window.
        let ctx = fs.context(&prompt, &toks(&[23]));
        assert_eq!(ctx.features[0].0 as usize, fs.offset_feature(1, Some(Token(23))));
    }

    #[test]
    fn short_sequences_use_padding() {
        let fs = FeatureSpace::with_dims(8, 3, 64, 64, 5, None);
        let ctx = fs.context(&toks(&[1]), &[]);
        assert_eq!(ctx.features[1].0 as usize, fs.offset_feature(2, None));
        assert_eq!(ctx.features[2].0 as usize, fs.offset_feature(3, None));
    }

    #[test]
    fn prompt_bucket_ignores_template_suffix_and_leading_tag() {
        let vocab = Vocab::default();
        let fs = FeatureSpace::new(&vocab);
        // "7.1: 2+3=?<think>" and "9.4: 2+3=?<think>" share the question
        // tail "2+3=?", so they must share the prompt bucket.
        let p1 = vocab.tokenize("7.1: 2+3=?<think>").unwrap();
        let p2 = vocab.tokenize("9.4: 2+3=?<think>").unwrap();
        let c1 = fs.context(&p1, &[]);
        let c2 = fs.context(&p2, &[]);
        assert_eq!(c1.features.last(), c2.features.last());

        // Different operands produce a different bucket.
        let p3 = vocab.tokenize("7.1: 2+4=?<think>").unwrap();
        let c3 = fs.context(&p3, &[]);
        assert_ne!(c1.features.last(), c3.features.last());
    }

    #[test]
    fn feature_indices_stay_in_bounds() {
        let vocab = Vocab::default();
        let fs = FeatureSpace::new(&vocab);
        let prompt = toks(&[0, 14, 15, 22]);
        for len in 0..6 {
            let prefix = toks(&vec![7u16; len]);
            let ctx = fs.context(&prompt, &prefix);
            for (f, _) in &ctx.features {
                assert!((*f as usize) < fs.num_features());
            }
        }
    }
}
