use super::ClipConfig;

/// One output's contribution to the objective: a shared advantage and the
/// per-token importance ratios.
#[derive(Debug, Clone)]
pub struct OutputTerms {
    pub advantage: f64,
    pub ratios: Vec<f64>,
}

/// All outputs of one admitted group.
#[derive(Debug, Clone)]
pub struct GroupTerms {
    pub outputs: Vec<OutputTerms>,
}

/// Scalar objective plus the per-token gradient coefficients that route
/// into the policy's closed-form log-probability gradients. Coefficients
/// follow iteration order: groups, then outputs, then tokens.
#[derive(Debug, Clone)]
pub struct ObjectiveValue {
    pub value: f64,
    pub grad_coefs: Vec<f64>,
}

/// One clipped surrogate term:
/// min(ratio * adv, clamp(ratio, 1 - eps_low, 1 + eps_high) * adv).
pub fn clipped_term(ratio: f64, adv: f64, cfg: &ClipConfig) -> f64 {
    debug_assert!(ratio > 0.0, "importance ratios are positive by construction");
    let clipped = ratio.clamp(1.0 - cfg.eps_low, 1.0 + cfg.eps_high);
    (ratio * adv).min(clipped * adv)
}

/// Token-level objective over a batch of groups: the plain sum of clipped
/// terms over every token of every output (no division by output length
/// unless `length_normalize` is set, which only the stage-1 objective
/// uses).
///
/// The gradient coefficient of a token is `adv * ratio` scaled by the
/// normalization factor when the unclipped branch attains the min (ties
/// included), and zero when the term sits on its clipped branch — there
/// the surrogate is locally constant in the parameters.
pub fn batch_objective(groups: &[GroupTerms], cfg: &ClipConfig) -> ObjectiveValue {
    let mut value = 0.0;
    let mut grad_coefs = Vec::new();
    for group in groups {
        for output in &group.outputs {
            let norm = if cfg.length_normalize && !output.ratios.is_empty() {
                1.0 / output.ratios.len() as f64
            } else {
                1.0
            };
            for &ratio in &output.ratios {
                let adv = output.advantage;
                let unclipped = ratio * adv;
                let clipped = ratio.clamp(1.0 - cfg.eps_low, 1.0 + cfg.eps_high) * adv;
                value += norm * unclipped.min(clipped);
                grad_coefs.push(if unclipped <= clipped { norm * adv * ratio } else { 0.0 });
            }
        }
    }
    ObjectiveValue { value, grad_coefs }
}
