use super::features::TokenContext;
use super::softmax::{entropy_of, token_distribution};
use super::PolicyParams;
use crate::error::Result;
use crate::vocab::Token;

/// One additive term of a scalar objective whose parameter gradient is
/// requested. `LogProb` contributes `coef * log pi(token | ctx)`;
/// `Entropy` contributes `coef * H(pi(. | ctx))`.
#[derive(Debug, Clone)]
pub enum GradTerm<'a> {
    LogProb {
        ctx: &'a TokenContext,
        token: Token,
        coef: f64,
    },
    Entropy {
        ctx: &'a TokenContext,
        coef: f64,
    },
}

/// Closed-form gradient of a weighted sum of log-probability and entropy
/// terms with respect to the policy weights, returned as a dense matrix in
/// the parameter layout.
///
/// For the linear softmax, d log pi(t|c) / dW[f, v] = x_f (1[v = t] - p_v)
/// and dH/dW[f, v] = -x_f p_v (ln p_v + H).
pub fn analytic_gradients(params: &PolicyParams, terms: &[GradTerm<'_>]) -> Result<Vec<f64>> {
    let v_count = params.vocab_size();
    let mut grad = vec![0.0; params.num_features() * v_count];
    for term in terms {
        match term {
            GradTerm::LogProb { ctx, token, coef } => {
                if *coef == 0.0 {
                    continue;
                }
                let p = token_distribution(params, ctx)?;
                for &(f, x) in &ctx.features {
                    let row = &mut grad[f as usize * v_count..(f as usize + 1) * v_count];
                    for (v, (g, pv)) in row.iter_mut().zip(&p).enumerate() {
                        let indicator = if v == token.index() { 1.0 } else { 0.0 };
                        *g += coef * x * (indicator - pv);
                    }
                }
            }
            GradTerm::Entropy { ctx, coef } => {
                if *coef == 0.0 {
                    continue;
                }
                let p = token_distribution(params, ctx)?;
                let h = entropy_of(&p);
                for &(f, x) in &ctx.features {
                    let row = &mut grad[f as usize * v_count..(f as usize + 1) * v_count];
                    for (g, pv) in row.iter_mut().zip(&p) {
                        let dh = if *pv > 0.0 { -pv * (pv.ln() + h) } else { 0.0 };
                        *g += coef * x * dh;
                    }
                }
            }
        }
    }
    Ok(grad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::policy::FeatureSpace;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ctx(features: Vec<(u32, f64)>) -> TokenContext {
        TokenContext::from_features(features)
    }

    #[test]
    fn zero_coefficients_zero_gradient() {
        let params = PolicyParams::zeros(3, 4);
        let c = ctx(vec![(0, 1.0), (2, 1.0)]);
        let terms = vec![
            GradTerm::LogProb { ctx: &c, token: Token(1), coef: 0.0 },
            GradTerm::Entropy { ctx: &c, coef: 0.0 },
        ];
        let g = analytic_gradients(&params, &terms).unwrap();
        assert!(g.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn single_term_uniform_policy_one_hot_feature() {
        // Gradient row at the active feature must be onehot(token) - 1/V.
        let params = PolicyParams::zeros(5, 4);
        let c = ctx(vec![(2, 1.0)]);
        let terms = vec![GradTerm::LogProb { ctx: &c, token: Token(3), coef: 1.0 }];
        let g = analytic_gradients(&params, &terms).unwrap();
        for v in 0..4 {
            let expect = if v == 3 { 1.0 - 0.25 } else { -0.25 };
            assert!((g[2 * 4 + v] - expect).abs() < 1e-15);
        }
        // All other rows stay zero.
        assert!(g[..8].iter().all(|&x| x == 0.0));
    }

    /// Scalar objective used by the finite-difference oracle.
    fn objective(params: &PolicyParams, terms: &[GradTerm<'_>]) -> f64 {
        use crate::policy::token_logprobs;
        let mut total = 0.0;
        for term in terms {
            match term {
                GradTerm::LogProb { ctx, token, coef } => {
                    total += coef * token_logprobs(params, ctx).unwrap()[token.index()];
                }
                GradTerm::Entropy { ctx, coef } => {
                    let p = token_distribution(params, ctx).unwrap();
                    total += coef * entropy_of(&p);
                }
            }
        }
        total
    }

    #[test]
    fn matches_central_finite_differences_on_random_batches() {
        let fs = FeatureSpace::with_dims(5, 2, 8, 8, 3, None);
        let nf = fs.num_features();
        let nv = fs.vocab_size();
        let mut rng = ChaCha8Rng::seed_from_u64(42);

        for _ in 0..100 {
            let mut params = PolicyParams::zeros(nf, nv);
            for f in 0..nf {
                for v in 0..nv {
                    params.set_weight(f, v, rng.gen_range(-1.5..1.5));
                }
            }
            let contexts: Vec<TokenContext> = (0..4)
                .map(|_| {
                    let n = rng.gen_range(1..4);
                    ctx((0..n)
                        .map(|_| (rng.gen_range(0..nf as u32), rng.gen_range(-1.0..1.0)))
                        .collect())
                })
                .collect();
            let terms: Vec<GradTerm<'_>> = contexts
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    if i % 3 == 2 {
                        GradTerm::Entropy { ctx: c, coef: rng.gen_range(-2.0..2.0) }
                    } else {
                        GradTerm::LogProb {
                            ctx: c,
                            token: Token(rng.gen_range(0..nv as u16)),
                            coef: rng.gen_range(-2.0..2.0),
                        }
                    }
                })
                .collect();

            let analytic = analytic_gradients(&params, &terms).unwrap();
            let h = 1e-5;
            let mut num = vec![0.0; analytic.len()];
            for f in 0..nf {
                for v in 0..nv {
                    let w0 = params.weight(f, v);
                    params.set_weight(f, v, w0 + h);
                    let plus = objective(&params, &terms);
                    params.set_weight(f, v, w0 - h);
                    let minus = objective(&params, &terms);
                    params.set_weight(f, v, w0);
                    num[f * nv + v] = (plus - minus) / (2.0 * h);
                }
            }
            let norm_a: f64 = analytic.iter().map(|x| x * x).sum::<f64>().sqrt();
            let norm_n: f64 = num.iter().map(|x| x * x).sum::<f64>().sqrt();
            let diff: f64 = analytic
                .iter()
                .zip(&num)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            let rel = diff / norm_a.max(norm_n).max(1e-12);
            assert!(rel <= 1e-5, "relative gradient error {rel} exceeds 1e-5");
        }
    }
}
