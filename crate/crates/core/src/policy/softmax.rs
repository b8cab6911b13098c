use super::features::TokenContext;
use super::PolicyParams;
use crate::error::{Error, Result};

pub(crate) fn logits(params: &PolicyParams, ctx: &TokenContext) -> Result<Vec<f64>> {
    let v = params.vocab_size();
    let mut out = vec![0.0; v];
    for &(f, x) in &ctx.features {
        let f = f as usize;
        if f >= params.num_features() {
            return Err(Error::invariant(format!(
                "feature index {f} out of range for {} features",
                params.num_features()
            )));
        }
        let row = &params.weights()[f * v..(f + 1) * v];
        for (o, w) in out.iter_mut().zip(row) {
            *o += x * w;
        }
    }
    if out.iter().any(|l| !l.is_finite()) {
        return Err(Error::invariant("non-finite logits"));
    }
    Ok(out)
}

/// Next-token probabilities: softmax of the feature-weight products.
pub fn token_distribution(params: &PolicyParams, ctx: &TokenContext) -> Result<Vec<f64>> {
    let mut z = logits(params, ctx)?;
    let max = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for l in &mut z {
        *l = (*l - max).exp();
        sum += *l;
    }
    for l in &mut z {
        *l /= sum;
    }
    Ok(z)
}

/// Log-probabilities over the vocabulary (stable log-softmax).
pub fn token_logprobs(params: &PolicyParams, ctx: &TokenContext) -> Result<Vec<f64>> {
    let z = logits(params, ctx)?;
    let max = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let log_sum = z.iter().map(|l| (l - max).exp()).sum::<f64>().ln();
    Ok(z.into_iter().map(|l| l - max - log_sum).collect())
}

/// Shannon entropy (nats) of the next-token distribution at one context.
pub fn context_entropy(params: &PolicyParams, ctx: &TokenContext) -> Result<f64> {
    let p = token_distribution(params, ctx)?;
    Ok(entropy_of(&p))
}

pub(crate) fn entropy_of(p: &[f64]) -> f64 {
    -p.iter().filter(|&&x| x > 0.0).map(|&x| x * x.ln()).sum::<f64>()
}

/// Mean token-level entropy over a sample of contexts. This is the scalar
/// the targeted entropy penalty regulates.
pub fn policy_entropy(params: &PolicyParams, contexts: &[TokenContext]) -> Result<f64> {
    if contexts.is_empty() {
        return Err(Error::invariant("policy entropy over an empty context set"));
    }
    let mut sum = 0.0;
    for ctx in contexts {
        sum += context_entropy(params, ctx)?;
    }
    Ok(sum / contexts.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ctx(features: Vec<(u32, f64)>) -> TokenContext {
        TokenContext::from_features(features)
    }

    #[test]
    fn zero_weights_give_uniform() {
        let params = PolicyParams::zeros(4, 8);
        let p = token_distribution(&params, &ctx(vec![(0, 1.0)])).unwrap();
        for x in &p {
            assert!((x - 0.125).abs() < 1e-15);
        }
    }

    #[test]
    fn large_logit_dominates() {
        let mut params = PolicyParams::zeros(2, 8);
        params.set_weight(0, 3, 20.0);
        let p = token_distribution(&params, &ctx(vec![(0, 1.0)])).unwrap();
        assert!(p[3] > 0.999);
    }

    #[test]
    fn probabilities_sum_to_one() {
        let mut params = PolicyParams::zeros(3, 6);
        for f in 0..3 {
            for v in 0..6 {
                params.set_weight(f, v, ((f * 7 + v * 13) % 9) as f64 - 4.0);
            }
        }
        let p = token_distribution(&params, &ctx(vec![(0, 1.0), (2, -0.5)])).unwrap();
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn uniform_entropy_is_log_vocab() {
        let params = PolicyParams::zeros(2, 32);
        let h = context_entropy(&params, &ctx(vec![(1, 1.0)])).unwrap();
        assert!((h - (32f64).ln()).abs() < 1e-12);
    }

    #[test]
    fn near_one_hot_entropy_approaches_zero() {
        let mut params = PolicyParams::zeros(1, 16);
        params.set_weight(0, 5, 40.0);
        let h = context_entropy(&params, &ctx(vec![(0, 1.0)])).unwrap();
        assert!(h < 1e-12);
    }

    #[test]
    fn hand_computed_entropy() {
        // Distribution (0.7, 0.1, 0.1, 0.1): logits = ln p give softmax = p
        // exactly, and -sum(p ln p) = 0.940448...
        let mut params = PolicyParams::zeros(1, 4);
        for (v, p) in [0.7f64, 0.1, 0.1, 0.1].iter().enumerate() {
            params.set_weight(0, v, p.ln());
        }
        let h = context_entropy(&params, &ctx(vec![(0, 1.0)])).unwrap();
        assert!((h - 0.940_447_988_9).abs() < 1e-9, "entropy was {h}");
    }

    #[test]
    fn empty_context_sample_is_error() {
        let params = PolicyParams::zeros(1, 4);
        assert!(policy_entropy(&params, &[]).is_err());
    }

    proptest! {
        #[test]
        fn distribution_normalized_for_random_params(
            weights in proptest::collection::vec(-10.0f64..10.0, 24),
            active in proptest::collection::vec((0u32..6, -2.0f64..2.0), 1..4),
        ) {
            let mut params = PolicyParams::zeros(6, 4);
            for (i, w) in weights.iter().enumerate() {
                params.set_weight(i / 4, i % 4, *w);
            }
            let p = token_distribution(&params, &ctx(active)).unwrap();
            prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            prop_assert!(p.iter().all(|x| *x > 0.0));
            let h = entropy_of(&p);
            prop_assert!(h >= 0.0 && h <= (4f64).ln() + 1e-12);
        }
    }
}
