use super::shingle::{jaccard, MinHashIndex, ShingleSet};
use super::PromptSample;
use crate::error::{Error, Result};

/// Candidate-pair generation strategy for fuzzy dedup.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Prefilter {
    /// Compare every candidate against every retained sample.
    Exact,
    /// MinHash/LSH candidate generation. Faster on large corpora; every
    /// candidate removal is still confirmed by exact Jaccard, so no sample
    /// is ever dropped on an approximate score alone.
    MinHash,
}

impl Prefilter {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Prefilter::Exact),
            "minhash" => Ok(Prefilter::MinHash),
            other => Err(Error::config(format!("unknown prefilter {other:?}"))),
        }
    }
}

/// Drop every sample whose question has Jaccard similarity >= `threshold`
/// with an earlier retained sample. First occurrence wins.
pub fn fuzzy_dedup(
    corpus: Vec<PromptSample>,
    threshold: f64,
    shingle_width: usize,
    prefilter: Prefilter,
    seed: u64,
) -> Result<Vec<PromptSample>> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::config("fuzzy threshold must be in (0, 1]"));
    }
    let sets: Vec<ShingleSet> = corpus
        .iter()
        .map(|s| ShingleSet::new(&s.id, &s.question, shingle_width))
        .collect();

    let mut retained: Vec<usize> = Vec::new();
    match prefilter {
        Prefilter::Exact => {
            for i in 0..corpus.len() {
                let dup = retained.iter().any(|&j| jaccard(&sets[i], &sets[j]) >= threshold);
                if !dup {
                    retained.push(i);
                }
            }
        }
        Prefilter::MinHash => {
            let mut index = MinHashIndex::new(64, 16, seed);
            for i in 0..corpus.len() {
                let sig = index.signature(&sets[i]);
                let dup = index
                    .candidates(&sig)
                    .into_iter()
                    .any(|j| jaccard(&sets[i], &sets[j]) >= threshold);
                if !dup {
                    index.insert(&sig, i);
                    retained.push(i);
                }
            }
        }
    }

    let keep: std::collections::HashSet<usize> = retained.into_iter().collect();
    Ok(corpus
        .into_iter()
        .enumerate()
        .filter(|(i, _)| keep.contains(i))
        .map(|(_, s)| s)
        .collect())
}
