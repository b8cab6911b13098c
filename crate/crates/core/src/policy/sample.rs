use rand::Rng;
use serde::{Deserialize, Serialize};

use super::features::FeatureSpace;
use super::softmax::token_logprobs;
use super::PolicyParams;
use crate::error::{Error, Result};
use crate::vocab::Token;

/// One sampled output: tokens (ending with end-of-sequence unless the
/// length cap hit first) and the per-token log-probabilities recorded at
/// sampling time under the sampling policy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rollout {
    pub tokens: Vec<Token>,
    pub logprobs_old: Vec<f64>,
    pub truncated: bool,
}

impl Rollout {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

/// Decoding temperature and nucleus size. The defaults reproduce plain
/// ancestral sampling, which is what training rollouts use.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingOptions {
    pub temperature: f64,
    pub top_p: f64,
}

impl Default for SamplingOptions {
    fn default() -> Self {
        SamplingOptions {
            temperature: 1.0,
            top_p: 1.0,
        }
    }
}

impl SamplingOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.temperature > 0.0) {
            return Err(Error::config("temperature must be > 0"));
        }
        if !(self.top_p > 0.0 && self.top_p <= 1.0) {
            return Err(Error::config("top_p must be in (0, 1]"));
        }
        Ok(())
    }
}

/// Apply temperature then nucleus truncation to a probability vector.
/// Returns the renormalized distribution and the nucleus member set.
fn shape_distribution(probs: &[f64], opts: &SamplingOptions) -> (Vec<f64>, Vec<bool>) {
    let mut p: Vec<f64> = if (opts.temperature - 1.0).abs() < f64::EPSILON {
        probs.to_vec()
    } else {
        // Softmax at temperature T applied to the same logits is
        // p_i^(1/T) renormalized.
        let inv_t = 1.0 / opts.temperature;
        let shaped: Vec<f64> = probs.iter().map(|x| x.powf(inv_t)).collect();
        let sum: f64 = shaped.iter().sum();
        shaped.into_iter().map(|x| x / sum).collect()
    };

    let mut in_nucleus = vec![true; p.len()];
    if opts.top_p < 1.0 {
        let mut order: Vec<usize> = (0..p.len()).collect();
        // Ties break to the lower token index so the nucleus is stable.
        order.sort_by(|&a, &b| p[b].partial_cmp(&p[a]).unwrap().then(a.cmp(&b)));
        let mut cum = 0.0;
        let mut cut = p.len();
        for (rank, &idx) in order.iter().enumerate() {
            cum += p[idx];
            if cum >= opts.top_p {
                cut = rank + 1;
                break;
            }
        }
        in_nucleus = vec![false; p.len()];
        for &idx in &order[..cut] {
            in_nucleus[idx] = true;
        }
        let mass: f64 = order[..cut].iter().map(|&i| p[i]).sum();
        for (i, x) in p.iter_mut().enumerate() {
            *x = if in_nucleus[i] { *x / mass } else { 0.0 };
        }
    }
    (p, in_nucleus)
}

fn draw(p: &[f64], rng: &mut impl Rng) -> usize {
    let u: f64 = rng.gen();
    let mut cum = 0.0;
    for (i, x) in p.iter().enumerate() {
        cum += x;
        if u < cum {
            return i;
        }
    }
    // Rounding slack: fall back to the last positive-probability token.
    p.iter().rposition(|&x| x > 0.0).unwrap_or(p.len() - 1)
}

/// Sample one rollout with explicit decoding options.
pub fn sample_rollout_with(
    params: &PolicyParams,
    fs: &FeatureSpace,
    prompt: &[Token],
    eos: Token,
    max_len: usize,
    opts: &SamplingOptions,
    rng: &mut impl Rng,
) -> Result<Rollout> {
    if max_len == 0 {
        return Err(Error::config("max_len must be >= 1"));
    }
    opts.validate()?;
    let plain = *opts == SamplingOptions::default();
    let mut tokens: Vec<Token> = Vec::new();
    let mut logprobs = Vec::new();
    let mut truncated = true;
    while tokens.len() < max_len {
        let ctx = fs.context(prompt, &tokens);
        let lps = token_logprobs(params, &ctx)?;
        let probs: Vec<f64> = lps.iter().map(|l| l.exp()).collect();
        let (shaped, in_nucleus) = shape_distribution(&probs, opts);
        let tok = draw(&shaped, rng);
        debug_assert!(in_nucleus[tok], "sampled token must lie in the nucleus");
        // Record the log-probability under the distribution the token was
        // drawn from. Plain sampling stores the exact log-softmax value, so
        // later ratio computations against identical parameters give 1.0
        // exactly.
        let lp = if plain { lps[tok] } else { shaped[tok].ln() };
        tokens.push(Token(tok as u16));
        logprobs.push(lp);
        if Token(tok as u16) == eos {
            truncated = false;
            break;
        }
    }
    Ok(Rollout {
        tokens,
        logprobs_old: logprobs,
        truncated,
    })
}

/// Sample one rollout under plain ancestral sampling (training rollouts).
pub fn sample_rollout(
    params: &PolicyParams,
    fs: &FeatureSpace,
    prompt: &[Token],
    eos: Token,
    max_len: usize,
    rng: &mut impl Rng,
) -> Result<Rollout> {
    sample_rollout_with(params, fs, prompt, eos, max_len, &SamplingOptions::default(), rng)
}

/// Sample a group of `g` independent rollouts under one params snapshot.
pub fn sample_group(
    params: &PolicyParams,
    fs: &FeatureSpace,
    prompt: &[Token],
    eos: Token,
    g: usize,
    max_len: usize,
    rng: &mut impl Rng,
) -> Result<Vec<Rollout>> {
    if g < 2 {
        return Err(Error::config("group size must be >= 2: group statistics are undefined"));
    }
    (0..g)
        .map(|_| sample_rollout(params, fs, prompt, eos, max_len, rng))
        .collect()
}

/// Per-token importance ratios of `params_new` against the sampling-time
/// log-probabilities stored in the rollout.
pub fn importance_ratios(
    params_new: &PolicyParams,
    fs: &FeatureSpace,
    prompt: &[Token],
    rollout: &Rollout,
) -> Result<Vec<f64>> {
    let mut ratios = Vec::with_capacity(rollout.len());
    for (t, tok) in rollout.tokens.iter().enumerate() {
        let ctx = fs.context(prompt, &rollout.tokens[..t]);
        let lp_new = token_logprobs(params_new, &ctx)?[tok.index()];
        ratios.push((lp_new - rollout.logprobs_old[t]).exp());
    }
    Ok(ratios)
}
