//! Corpus curation: the four-stage data preparation pipeline.
//!
//! Stages run in a fixed order — exact dedup, fuzzy (Jaccard) dedup,
//! semantic dedup, question-type filtering — and every stage returns an
//! order-preserving subsequence of its input. All removal decisions are
//! deterministic given the config and seed.

mod embed;
mod fuzzy;
mod kmeans;
mod normalize;
mod qtype;
mod semantic;
mod shingle;

pub use embed::{cosine, embedder_by_name, embedder_names, Embedder, EmbeddingVector, HashedNgramEmbedder};
pub use fuzzy::{fuzzy_dedup, Prefilter};
pub use kmeans::{kmeans, KMeansConfig};
pub use normalize::normalize_text;
pub use qtype::{infer_qtype, type_filter};
pub use semantic::semantic_dedup;
pub use shingle::{jaccard, MinHashIndex, ShingleSet};

use std::collections::HashSet;
use std::fmt;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Where a sample came from. Synthetic data is excluded from training by
/// the caller; the tag is carried through curation untouched.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Open,
    Proprietary,
    Synthetic,
}

/// Question type. Choice, true/false, and proof questions cannot be scored
/// reliably by an automatic verifier and are dropped by the type filter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QType {
    FillIn,
    Calculation,
    SingleChoice,
    MultiChoice,
    TrueFalse,
    Proof,
    Mixed,
}

impl QType {
    /// True when a rule-based verifier can score answers of this type.
    pub fn is_verifiable(self) -> bool {
        !matches!(
            self,
            QType::SingleChoice | QType::MultiChoice | QType::TrueFalse | QType::Proof
        )
    }
}

/// One question/answer pair, the unit of curation and sampling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PromptSample {
    pub id: String,
    pub question: String,
    pub answer: String,
    pub source: Source,
    pub qtype: QType,
}

#[derive(Deserialize)]
struct RawSample {
    id: String,
    question: String,
    answer: String,
    #[serde(default = "default_source")]
    source: Source,
    #[serde(default)]
    qtype: Option<QType>,
}

fn default_source() -> Source {
    Source::Open
}

impl PromptSample {
    /// Validate the per-sample invariants: nonempty question and answer.
    pub fn validate(&self) -> Result<()> {
        if self.question.trim().is_empty() {
            return Err(Error::data(format!("sample {}: empty question", self.id)));
        }
        if self.answer.trim().is_empty() {
            return Err(Error::data(format!("sample {}: empty answer", self.id)));
        }
        Ok(())
    }
}

/// Pipeline stage names, in their mandatory execution order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    Exact,
    Fuzzy,
    Semantic,
    Type,
}

impl Stage {
    pub fn parse_list(spec: &str) -> Result<Vec<Stage>> {
        let mut stages = Vec::new();
        for part in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let stage = match part {
                "exact" => Stage::Exact,
                "fuzzy" => Stage::Fuzzy,
                "semantic" => Stage::Semantic,
                "type" => Stage::Type,
                other => return Err(Error::config(format!("unknown stage {other:?}"))),
            };
            stages.push(stage);
        }
        if stages.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::config(
                "stages must be listed in pipeline order: exact,fuzzy,semantic,type",
            ));
        }
        Ok(stages)
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Stage::Exact => "exact",
            Stage::Fuzzy => "fuzzy",
            Stage::Semantic => "semantic",
            Stage::Type => "type",
        };
        f.write_str(s)
    }
}

/// Tunables for the whole pipeline.
#[derive(Debug, Clone)]
pub struct CurateConfig {
    pub stages: Vec<Stage>,
    /// Character n-gram width used for shingles and embeddings.
    pub shingle_width: usize,
    /// Jaccard similarity at or above which the later sample is dropped.
    pub fuzzy_threshold: f64,
    /// Exact pairwise scan or MinHash candidate generation. MinHash
    /// candidates are always confirmed by exact Jaccard before removal.
    pub prefilter: Prefilter,
    /// Embedding dimension for the hashed n-gram embedder.
    pub embed_dim: usize,
    /// Embedder strategy name; see [`embedder_names`].
    pub embedder: String,
    /// Cosine similarity at or above which the later sample is dropped.
    pub cosine_threshold: f64,
    /// Cluster count; `None` picks `max(1, n / 64)`.
    pub kmeans_k: Option<usize>,
    pub kmeans_max_iters: usize,
    pub seed: u64,
}

impl Default for CurateConfig {
    fn default() -> Self {
        CurateConfig {
            stages: vec![Stage::Exact, Stage::Fuzzy, Stage::Semantic, Stage::Type],
            shingle_width: 3,
            fuzzy_threshold: 0.8,
            prefilter: Prefilter::Exact,
            embed_dim: 256,
            embedder: "hashed-ngram".to_string(),
            cosine_threshold: 0.92,
            kmeans_k: None,
            kmeans_max_iters: 50,
            seed: 0,
        }
    }
}

impl CurateConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.fuzzy_threshold > 0.0 && self.fuzzy_threshold <= 1.0) {
            return Err(Error::config("fuzzy threshold must be in (0, 1]"));
        }
        if !(self.cosine_threshold > 0.0 && self.cosine_threshold <= 1.0) {
            return Err(Error::config("cosine threshold must be in (0, 1]"));
        }
        if self.shingle_width == 0 {
            return Err(Error::config("shingle width must be >= 1"));
        }
        if self.embed_dim == 0 {
            return Err(Error::config("embedding dimension must be >= 1"));
        }
        Ok(())
    }
}

/// Removal accounting for one pipeline stage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageReport {
    pub stage: Stage,
    pub removed_count: usize,
    pub retained_count: usize,
}

/// Render stage reports as the removal-report CSV.
pub fn report_csv(reports: &[StageReport]) -> String {
    let mut out = String::from("stage,removed_count,retained_count\n");
    for r in reports {
        out.push_str(&format!("{},{},{}\n", r.stage, r.removed_count, r.retained_count));
    }
    out
}

/// Drop all but the first occurrence of each normalized question.
pub fn exact_dedup(corpus: Vec<PromptSample>) -> Vec<PromptSample> {
    let mut seen = HashSet::new();
    corpus
        .into_iter()
        .filter(|s| seen.insert(normalize_text(&s.question)))
        .collect()
}

/// Run the configured stages in pipeline order over a corpus.
pub fn curate(
    corpus: Vec<PromptSample>,
    cfg: &CurateConfig,
) -> Result<(Vec<PromptSample>, Vec<StageReport>)> {
    cfg.validate()?;
    check_ids_unique(&corpus)?;
    let mut current = corpus;
    let mut reports = Vec::new();
    for stage in &cfg.stages {
        let before = current.len();
        current = match stage {
            Stage::Exact => exact_dedup(current),
            Stage::Fuzzy => fuzzy_dedup(
                current,
                cfg.fuzzy_threshold,
                cfg.shingle_width,
                cfg.prefilter,
                cfg.seed,
            )?,
            Stage::Semantic => {
                let embedder = embedder_by_name(&cfg.embedder, cfg.embed_dim, cfg.shingle_width)?;
                semantic_dedup(
                    current,
                    embedder.as_ref(),
                    cfg.kmeans_k,
                    cfg.kmeans_max_iters,
                    cfg.cosine_threshold,
                    cfg.seed,
                )?
            }
            Stage::Type => type_filter(current),
        };
        reports.push(StageReport {
            stage: *stage,
            removed_count: before - current.len(),
            retained_count: current.len(),
        });
    }
    Ok((current, reports))
}

fn check_ids_unique(corpus: &[PromptSample]) -> Result<()> {
    let mut ids = HashSet::new();
    for s in corpus {
        if !ids.insert(s.id.as_str()) {
            return Err(Error::data(format!("duplicate sample id {:?}", s.id)));
        }
    }
    Ok(())
}

/// Read a JSON Lines corpus. Samples missing an explicit `qtype` get one
/// inferred from question text heuristics; ids must be unique and both
/// question and answer nonempty.
pub fn read_jsonl(path: &Path) -> Result<Vec<PromptSample>> {
    let file = std::fs::File::open(path)?;
    let reader = BufReader::new(file);
    let mut corpus = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawSample = serde_json::from_str(&line)
            .map_err(|e| Error::data(format!("line {}: {e}", lineno + 1)))?;
        let qtype = raw.qtype.unwrap_or_else(|| infer_qtype(&raw.question));
        let sample = PromptSample {
            id: raw.id,
            question: raw.question,
            answer: raw.answer,
            source: raw.source,
            qtype,
        };
        sample.validate()?;
        corpus.push(sample);
    }
    check_ids_unique(&corpus)?;
    Ok(corpus)
}

/// Write a corpus as JSON Lines, one sample per line.
pub fn write_jsonl(path: &Path, corpus: &[PromptSample]) -> Result<()> {
    let mut file = std::fs::File::create(path)?;
    for sample in corpus {
        serde_json::to_writer(&mut file, sample)?;
        file.write_all(b"\n")?;
    }
    Ok(())
}
