use rayon::prelude::*;

use super::embed::{cosine, Embedder};
use super::kmeans::{kmeans, KMeansConfig};
use super::PromptSample;
use crate::error::{Error, Result};

/// Semantic dedup: cluster question embeddings with k-means, compare all
/// pairs within each cluster, and drop the later sample (input order) of
/// every pair at or above the cosine threshold.
pub fn semantic_dedup(
    corpus: Vec<PromptSample>,
    embedder: &dyn Embedder,
    k: Option<usize>,
    max_iters: usize,
    cosine_threshold: f64,
    seed: u64,
) -> Result<Vec<PromptSample>> {
    if !(cosine_threshold > 0.0 && cosine_threshold <= 1.0) {
        return Err(Error::config("cosine threshold must be in (0, 1]"));
    }
    if corpus.is_empty() {
        return Ok(corpus);
    }
    let k = k.unwrap_or_else(|| (corpus.len() / 64).max(1));
    if k > corpus.len() {
        return Err(Error::config(format!(
            "k = {k} exceeds corpus size {}",
            corpus.len()
        )));
    }

    let embeddings: Vec<Vec<f64>> = corpus
        .par_iter()
        .map(|s| embedder.embed(&s.id, &s.question).values)
        .collect();

    let assignment = kmeans(
        &embeddings,
        &KMeansConfig {
            k,
            max_iters,
            seed,
        },
    )?;

    let mut clusters: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (i, c) in assignment.iter().enumerate() {
        clusters[*c].push(i); // input order preserved within each cluster
    }

    let mut removed = vec![false; corpus.len()];
    for members in &clusters {
        for (a_pos, &i) in members.iter().enumerate() {
            for &j in &members[a_pos + 1..] {
                if cosine(&embeddings[i], &embeddings[j]) >= cosine_threshold {
                    removed[j] = true;
                }
            }
        }
    }

    Ok(corpus
        .into_iter()
        .enumerate()
        .filter(|(i, _)| !removed[*i])
        .map(|(_, s)| s)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::embed::HashedNgramEmbedder;
    use crate::corpus::{QType, Source};

    fn sample(id: &str, q: &str) -> PromptSample {
        PromptSample {
            id: id.to_string(),
            question: q.to_string(),
            answer: "1".to_string(),
            source: Source::Open,
            qtype: QType::Calculation,
        }
    }

    #[test]
    fn two_identical_questions_one_cluster() {
        let e = HashedNgramEmbedder::new(256, 3);
        let corpus = vec![sample("a", "seven plus one"), sample("b", "seven plus one")];
        let out = semantic_dedup(corpus, &e, Some(1), 50, 0.92, 0).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].id, "a");
    }

    #[test]
    fn no_similar_pairs_unchanged() {
        let e = HashedNgramEmbedder::new(256, 3);
        let corpus = vec![
            sample("a", "how many apples are left"),
            sample("b", "compute the square root of ninety"),
            sample("c", "trains depart every nine minutes"),
        ];
        let out = semantic_dedup(corpus.clone(), &e, Some(1), 50, 0.92, 0).unwrap();
        assert_eq!(out, corpus);
    }

    #[test]
    fn planted_paraphrase_pairs_one_removal_each() {
        // Three well-separated topic groups; each contains 10 paraphrase
        // pairs. Pick the threshold between the measured within-pair cosine
        // and the cross-pair cosine, so exactly one sample per pair goes.
        let e = HashedNgramEmbedder::new(256, 3);
        let topics = ["apples", "stations", "homework"];
        let fillers = [
            "seventeen crimson baskets",
            "thirty wooden shelves",
            "ninety calculating machines",
            "fifteen velvet curtains",
            "eighty marble staircases",
            "sixty whistling kettles",
            "twenty embroidered cushions",
            "seventy lacquered cabinets",
            "eleven sprawling vineyards",
            "forty shimmering lanterns",
        ];
        let mut corpus = Vec::new();
        for (t, topic) in topics.iter().enumerate() {
            for (p, filler) in fillers.iter().enumerate() {
                // Each pair gets long distinctive filler so pairs within a
                // topic stay well apart, while the paraphrase differs from
                // its original by a single short suffix.
                let original = format!("{topic} question about {filler} counted twice");
                let paraphrase = format!("{topic} question about {filler} counted twice please");
                corpus.push(sample(&format!("t{t}p{p}a"), &original));
                corpus.push(sample(&format!("t{t}p{p}b"), &paraphrase));
            }
        }

        // Measure within-pair and cross-pair cosines.
        let emb: Vec<Vec<f64>> = corpus.iter().map(|s| e.embed(&s.id, &s.question).values).collect();
        let mut min_pair: f64 = 1.0;
        let mut max_cross: f64 = 0.0;
        for i in (0..corpus.len()).step_by(2) {
            min_pair = min_pair.min(cosine(&emb[i], &emb[i + 1]));
        }
        for i in 0..corpus.len() {
            for j in (i + 1)..corpus.len() {
                if j != i + 1 || i % 2 != 0 {
                    max_cross = max_cross.max(cosine(&emb[i], &emb[j]));
                }
            }
        }
        assert!(min_pair > max_cross, "pairs ({min_pair}) must separate from crosses ({max_cross})");
        let threshold = (min_pair + max_cross) / 2.0;

        let out = semantic_dedup(corpus, &e, Some(3), 50, threshold, 11).unwrap();
        assert_eq!(out.len(), 30, "exactly one removal per planted pair");
        assert!(out.iter().all(|s| s.id.ends_with('a')), "the later sample of each pair goes");
    }

    #[test]
    fn k_exceeding_corpus_is_config_error() {
        let e = HashedNgramEmbedder::new(64, 3);
        let corpus = vec![sample("a", "one"), sample("b", "two")];
        assert!(semantic_dedup(corpus, &e, Some(5), 50, 0.9, 0).is_err());
    }
}
