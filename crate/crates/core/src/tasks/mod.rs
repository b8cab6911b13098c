//! Synthetic verifiable arithmetic tasks.
//!
//! The generator renders templated questions over the small vocabulary and
//! stores exact gold answers, so the rule verifier can score responses with
//! no ambiguity. Question ids and an optional `seed.index:` tag prefix make
//! corpora from different seeds provably disjoint, which keeps held-out
//! evaluation clean.
//!
//! Templates span a real difficulty range for the policy: the answer of a
//! binary task is a function of the question tail the policy's prompt
//! bucket sees, while two-step chains leave the leading operand outside
//! every feature, so they stay hard no matter how long training runs.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::{PromptSample, QType, Source};
use crate::error::{Error, Result};
use crate::policy::{sample_group, FeatureSpace, PolicyParams, Rollout};
use crate::vocab::Vocab;

/// Task families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TemplateId {
    Add,
    Sub,
    Mul,
    Chain,
}

/// One task template: a family plus its operand range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TaskTemplate {
    pub id: TemplateId,
    pub lo: u8,
    pub hi: u8,
}

impl TaskTemplate {
    pub fn new(id: TemplateId, lo: u8, hi: u8) -> Result<Self> {
        if lo > hi || hi > 9 {
            return Err(Error::config("operand range must satisfy lo <= hi <= 9"));
        }
        Ok(TaskTemplate { id, lo, hi })
    }

    /// Parse "add", "sub:2-9", etc. The optional suffix narrows the
    /// operand range.
    pub fn parse(spec: &str) -> Result<Self> {
        let (name, range) = match spec.split_once(':') {
            Some((n, r)) => (n, Some(r)),
            None => (spec, None),
        };
        let id = match name {
            "add" => TemplateId::Add,
            "sub" => TemplateId::Sub,
            "mul" => TemplateId::Mul,
            "chain" => TemplateId::Chain,
            other => return Err(Error::config(format!("unknown template {other:?}"))),
        };
        let (lo, hi) = match range {
            None => (0, 9),
            Some(r) => {
                let (a, b) = r
                    .split_once('-')
                    .ok_or_else(|| Error::config(format!("bad range {r:?}, expected lo-hi")))?;
                (
                    a.parse().map_err(|_| Error::config("bad range bound"))?,
                    b.parse().map_err(|_| Error::config("bad range bound"))?,
                )
            }
        };
        TaskTemplate::new(id, lo, hi)
    }

    pub fn parse_list(spec: &str) -> Result<Vec<TaskTemplate>> {
        let templates: Vec<TaskTemplate> = spec
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(TaskTemplate::parse)
            .collect::<Result<_>>()?;
        if templates.is_empty() {
            return Err(Error::config("at least one template required"));
        }
        Ok(templates)
    }
}

/// Question tag style. The seed-indexed tag makes questions from distinct
/// seeds distinct by construction; untagged questions reproduce the bare
/// template text (small template families may then repeat questions).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TagStyle {
    SeedIndexed,
    None,
}

fn draw_operands(template: &TaskTemplate, rng: &mut ChaCha8Rng) -> (String, i64) {
    let lo = template.lo as i64;
    let hi = template.hi as i64;
    let mut pick = |rng: &mut ChaCha8Rng| rng.gen_range(lo..=hi);
    match template.id {
        TemplateId::Add => {
            let (x, y) = (pick(rng), pick(rng));
            (format!("{x}+{y}"), x + y)
        }
        TemplateId::Sub => {
            let (a, b) = (pick(rng), pick(rng));
            let (x, y) = (a.max(b), a.min(b));
            (format!("{x}-{y}"), x - y)
        }
        TemplateId::Mul => {
            let (x, y) = (pick(rng), pick(rng));
            (format!("{x}*{y}"), x * y)
        }
        TemplateId::Chain => {
            let (x, y) = (pick(rng), pick(rng));
            // Keep the result non-negative: the subtrahend stays within
            // the running sum.
            let z_hi = hi.min(x + y);
            let z = if z_hi <= lo { lo.min(z_hi) } else { rng.gen_range(lo.min(z_hi)..=z_hi) };
            (format!("{x}+{y}-{z}"), x + y - z)
        }
    }
}

/// Generate `count` tasks, deterministically from the seed.
pub fn generate_tasks(
    templates: &[TaskTemplate],
    count: usize,
    seed: u64,
    tag: TagStyle,
) -> Result<Vec<PromptSample>> {
    if count == 0 {
        return Err(Error::config("task count must be >= 1"));
    }
    if templates.is_empty() {
        return Err(Error::config("at least one template required"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7461_736b); // domain-separated stream
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let template = templates[rng.gen_range(0..templates.len())];
        let (core, answer) = draw_operands(&template, &mut rng);
        let question = match tag {
            TagStyle::SeedIndexed => format!("{seed}.{i}: {core}=?"),
            TagStyle::None => format!("{core}=?"),
        };
        out.push(PromptSample {
            id: format!("t{seed}-{i}"),
            question,
            answer: answer.to_string(),
            source: Source::Synthetic,
            qtype: QType::Calculation,
        });
    }
    Ok(out)
}

/// Prompt tokens for a task question: the tokenized question text plus the
/// opening think marker, mirroring a chat template that starts the
/// response inside the thinking region.
pub fn prompt_tokens(vocab: &Vocab, question: &str) -> Result<Vec<crate::vocab::Token>> {
    let mut toks = vocab.tokenize(question)?;
    toks.push(vocab.think_open());
    Ok(toks)
}

/// Histogram of per-task group mean rewards under a policy, the tool for
/// tuning a corpus into a target oversampling regime.
#[derive(Debug, Clone)]
pub struct DifficultyProfile {
    /// Group mean reward per task, in corpus order.
    pub per_task_mu: Vec<(String, f64)>,
    /// Mass over 8 equal mu buckets spanning [-1, 1].
    pub histogram: [usize; 8],
    /// Fraction of groups passing the admission constraint.
    pub admitted_fraction: f64,
}

impl DifficultyProfile {
    pub fn bucket_of(mu: f64) -> usize {
        (((mu + 1.0) / 2.0 * 8.0) as usize).min(7)
    }
}

/// Estimate per-task difficulty by sampling one scored group per task.
/// Scoring is injected so the profile uses exactly the reward path the
/// trainer uses.
pub fn difficulty_profile<S>(
    corpus: &[PromptSample],
    params: &PolicyParams,
    fs: &FeatureSpace,
    vocab: &Vocab,
    g: usize,
    max_len: usize,
    seed: u64,
    scorer: S,
) -> Result<DifficultyProfile>
where
    S: Fn(&PromptSample, &Rollout) -> Result<f64>,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x70_726f_66);
    let mut per_task_mu = Vec::with_capacity(corpus.len());
    let mut histogram = [0usize; 8];
    let mut admitted = 0usize;
    for sample in corpus {
        let prompt = prompt_tokens(vocab, &sample.question)?;
        let group = sample_group(params, fs, &prompt, vocab.eos(), g, max_len, &mut rng)?;
        let mut correct = 0usize;
        let mut sum = 0i64;
        for rollout in &group {
            let r = scorer(sample, rollout)?;
            if r > 0.0 {
                correct += 1;
                sum += 1;
            } else {
                sum -= 1;
            }
        }
        let mu = sum as f64 / g as f64;
        histogram[DifficultyProfile::bucket_of(mu)] += 1;
        if correct > 0 && correct < g {
            admitted += 1;
        }
        per_task_mu.push((sample.id.clone(), mu));
    }
    Ok(DifficultyProfile {
        per_task_mu,
        histogram,
        admitted_fraction: admitted as f64 / corpus.len().max(1) as f64,
    })
}

/// A hand-built policy that solves every binary-template question with a
/// single-digit answer: the question bucket points at the answer digit,
/// template rules close the think region immediately and stop after one
/// answer token. Chains and two-digit answers stay unsolved. Used by tests
/// and profiles as a stand-in for a converged policy.
pub fn oracle_policy(fs: &FeatureSpace, vocab: &Vocab, templates: &[TaskTemplate]) -> Result<PolicyParams> {
    let mut params = PolicyParams::zeros(fs.num_features(), fs.vocab_size());
    let f_close = fs.offset_feature(1, Some(vocab.think_open()));
    params.set_weight(f_close, vocab.think_close().index(), 80.0);
    let f_stop = fs.offset_feature(2, Some(vocab.think_close()));
    params.set_weight(f_stop, vocab.eos().index(), 80.0);

    for template in templates {
        for x in template.lo..=template.hi {
            for y in template.lo..=template.hi {
                let core = match template.id {
                    TemplateId::Add => format!("{x}+{y}"),
                    TemplateId::Sub => {
                        if y > x {
                            continue;
                        }
                        format!("{x}-{y}")
                    }
                    TemplateId::Mul => format!("{x}*{y}"),
                    TemplateId::Chain => continue, // out of reach by design
                };
                let answer = match template.id {
                    TemplateId::Add => (x + y) as i64,
                    TemplateId::Sub => (x - y) as i64,
                    TemplateId::Mul => (x as i64) * (y as i64),
                    TemplateId::Chain => unreachable!(),
                };
                if !(0..10).contains(&answer) {
                    continue; // two-digit answers are beyond the oracle
                }
                let question = vocab.tokenize(&format!("{core}=?"))?;
                let bucket = fs.prompt_bucket_feature(&question);
                params.set_weight(bucket, vocab.digit(answer as u8).index(), 40.0);
            }
        }
    }
    Ok(params)
}
