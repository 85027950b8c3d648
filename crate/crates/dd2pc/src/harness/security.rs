use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::SeededRng;

/// 1 − 2/(θ+1): the non-shrinking probability when Â is taken as uniform
/// over its whole support [l₁+l₂, r₁+r₂].
pub fn support_law(theta: f64) -> f64 {
    1.0 - 2.0 / (theta + 1.0)
}

/// 1 − 1/θ: the exact non-shrinking probability of the fixed-A game, where
/// Â is uniform over an interval of width θ·L₁ shifted by A.
pub fn fixed_a_law(theta: f64) -> f64 {
    1.0 - 1.0 / theta
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SecurityReport {
    pub theta: f64,
    pub trials: usize,
    /// Fraction of draws where Bob cannot narrow A's interval.
    pub estimate: f64,
    pub support_law: f64,
    pub fixed_a_law: f64,
    /// Binomial standard error under each law.
    pub sigma_support: f64,
    pub sigma_fixed_a: f64,
    pub within_3sigma_support: bool,
    pub within_3sigma_fixed_a: bool,
}

fn sigma(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

/// Monte Carlo of the masking game on one entry.
///
/// Private data lives in [l₁, r₁] = [0, 1]; the mask range [l₂, r₂] has width
/// θ and is centred on zero. Each trial fixes A uniformly in the data range,
/// draws R uniformly in the mask range and asks whether Â = A + R falls in
/// [l₂+r₁, l₁+r₂], where Bob learns nothing new about A.
pub fn security_theta_probability(theta: f64, trials: usize, seed: u64) -> Result<SecurityReport> {
    if !(theta > 1.0) || !theta.is_finite() {
        return Err(Error::invalid(format!("theta must be > 1, got {theta}")));
    }
    if trials == 0 {
        return Err(Error::invalid("security experiment needs trials >= 1"));
    }
    let (l1, r1) = (0.0, 1.0);
    let (l2, r2) = (-theta / 2.0, theta / 2.0);
    let mut rng = SeededRng::new(seed).fork("security-theta");
    let mut safe = 0usize;
    for _ in 0..trials {
        let a = rng.uniform(l1, r1);
        let hat = a + rng.uniform(l2, r2);
        if hat >= l2 + r1 && hat <= l1 + r2 {
            safe += 1;
        }
    }
    let estimate = safe as f64 / trials as f64;
    let (pp, pf) = (support_law(theta), fixed_a_law(theta));
    let (sp, sf) = (sigma(pp, trials), sigma(pf, trials));
    Ok(SecurityReport {
        theta,
        trials,
        estimate,
        support_law: pp,
        fixed_a_law: pf,
        sigma_support: sp,
        sigma_fixed_a: sf,
        within_3sigma_support: (estimate - pp).abs() <= 3.0 * sp,
        within_3sigma_fixed_a: (estimate - pf).abs() <= 3.0 * sf,
    })
}
