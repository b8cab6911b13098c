use std::collections::{HashMap, HashSet};

use super::normalize_text;

/// Character n-gram set of a normalized question.
#[derive(Debug, Clone)]
pub struct ShingleSet {
    pub sample_id: String,
    width: usize,
    shingles: HashSet<String>,
}

impl ShingleSet {
    pub fn new(sample_id: &str, question: &str, width: usize) -> Self {
        assert!(width >= 1, "shingle width must be >= 1");
        let text = normalize_text(question);
        let chars: Vec<char> = text.chars().collect();
        let mut shingles = HashSet::new();
        if chars.is_empty() {
            // empty question -> empty set
        } else if chars.len() < width {
            // Too short to shingle: treat the whole text as one shingle.
            shingles.insert(text);
        } else {
            for w in chars.windows(width) {
                shingles.insert(w.iter().collect());
            }
        }
        ShingleSet {
            sample_id: sample_id.to_string(),
            width,
            shingles,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.shingles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shingles.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.shingles.iter().map(String::as_str)
    }
}

/// Exact Jaccard similarity |a ∩ b| / |a ∪ b|. Two empty sets count as
/// identical (similarity 1).
pub fn jaccard(a: &ShingleSet, b: &ShingleSet) -> f64 {
    assert_eq!(a.width, b.width, "jaccard requires a common shingle width");
    if a.shingles.is_empty() && b.shingles.is_empty() {
        return 1.0;
    }
    let inter = a.shingles.intersection(&b.shingles).count();
    let union = a.shingles.len() + b.shingles.len() - inter;
    inter as f64 / union as f64
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// FNV-1a over bytes with a seed mixed in. Stable across platforms and
/// runs, which keeps removal decisions reproducible.
pub(crate) fn fnv1a(seed: u64, bytes: &[u8]) -> u64 {
    let mut h = FNV_OFFSET ^ seed.wrapping_mul(FNV_PRIME);
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

/// MinHash + banded LSH candidate index for the fuzzy-dedup prefilter.
///
/// Candidates produced here are only suggestions: every removal is
/// confirmed by exact Jaccard before a sample is dropped.
pub struct MinHashIndex {
    num_perm: usize,
    bands: usize,
    rows: usize,
    seed: u64,
    buckets: Vec<HashMap<u64, Vec<usize>>>,
}

impl MinHashIndex {
    pub fn new(num_perm: usize, bands: usize, seed: u64) -> Self {
        assert!(num_perm % bands == 0, "num_perm must divide into bands");
        MinHashIndex {
            num_perm,
            bands,
            rows: num_perm / bands,
            seed,
            buckets: vec![HashMap::new(); bands],
        }
    }

    pub fn signature(&self, set: &ShingleSet) -> Vec<u64> {
        (0..self.num_perm)
            .map(|p| {
                set.iter()
                    .map(|s| fnv1a(self.seed.wrapping_add(p as u64), s.as_bytes()))
                    .min()
                    .unwrap_or(u64::MAX)
            })
            .collect()
    }

    /// Retained items sharing at least one LSH band with the signature.
    pub fn candidates(&self, sig: &[u64]) -> Vec<usize> {
        let mut out: Vec<usize> = Vec::new();
        for (band, bucket) in self.buckets.iter().enumerate() {
            let key = band_key(sig, band, self.rows);
            if let Some(ids) = bucket.get(&key) {
                out.extend_from_slice(ids);
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn insert(&mut self, sig: &[u64], id: usize) {
        for band in 0..self.bands {
            let key = band_key(sig, band, self.rows);
            self.buckets[band].entry(key).or_default().push(id);
        }
    }
}

fn band_key(sig: &[u64], band: usize, rows: usize) -> u64 {
    let mut h = FNV_OFFSET;
    for &v in &sig[band * rows..(band + 1) * rows] {
        for b in v.to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(FNV_PRIME);
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(text: &str) -> ShingleSet {
        ShingleSet::new("t", text, 3)
    }

    #[test]
    fn identical_nonempty_sets_have_similarity_one() {
        let a = set("the same question");
        let b = set("the same question");
        assert_eq!(jaccard(&a, &b), 1.0);
    }

    #[test]
    fn disjoint_sets_have_similarity_zero() {
        let a = set("aaaaaa");
        let b = set("zzzzzz");
        assert_eq!(jaccard(&a, &b), 0.0);
    }

    #[test]
    fn hand_counted_overlap() {
        // Shingles of "abcd": {abc, bcd}; of "bcde": {bcd, cde}.
        // Intersection 1, union 3.
        let a = set("abcd");
        let b = set("bcde");
        assert!((jaccard(&a, &b) - 1.0 / 3.0).abs() < 1e-15);

        // Explicit enumerated example: a = {ab,bc,cd}, b = {bc,cd,de}
        // using width-2 shingles -> 2/4 = 0.5.
        let a = ShingleSet::new("a", "abcd", 2);
        let b = ShingleSet::new("b", "bcde", 2);
        assert_eq!(jaccard(&a, &b), 0.5);
    }

    #[test]
    fn both_empty_defined_as_one() {
        let a = ShingleSet::new("a", "", 3);
        let b = ShingleSet::new("b", "", 3);
        assert!(a.is_empty());
        assert_eq!(jaccard(&a, &b), 1.0);
    }

    #[test]
    fn minhash_candidates_include_near_duplicates() {
        let mut index = MinHashIndex::new(64, 16, 7);
        let a = set("the quick brown fox jumps over the lazy dog today");
        let b = set("the quick brown fox jumps over the lazy cat today");
        let sig_a = index.signature(&a);
        index.insert(&sig_a, 0);
        let sig_b = index.signature(&b);
        assert!(index.candidates(&sig_b).contains(&0));
    }

    proptest! {
        #[test]
        fn jaccard_symmetric_and_bounded(a in "[a-f ]{0,40}", b in "[a-f ]{0,40}") {
            let sa = set(&a);
            let sb = set(&b);
            let ab = jaccard(&sa, &sb);
            let ba = jaccard(&sb, &sa);
            prop_assert_eq!(ab, ba);
            prop_assert!((0.0..=1.0).contains(&ab));
        }
    }
}
