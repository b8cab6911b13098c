use super::ClipConfig;

/// Targeted entropy penalty |entropy - target| * coeff, added to the
/// minimized loss. Unlike a one-sided entropy bonus this pulls the policy
/// entropy toward the target from above and below.
pub fn targeted_entropy_penalty(entropy: f64, cfg: &ClipConfig) -> f64 {
    debug_assert!(entropy >= 0.0);
    (entropy - cfg.entropy_target).abs() * cfg.entropy_coeff
}

/// Subgradient sign of the penalty with respect to the entropy: +1 above
/// target, -1 below, 0 exactly at the target.
pub fn entropy_penalty_sign(entropy: f64, target: f64) -> f64 {
    if entropy > target {
        1.0
    } else if entropy < target {
        -1.0
    } else {
        0.0
    }
}
