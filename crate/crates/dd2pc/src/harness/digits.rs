use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::SeededRng;

/// Pr(n, d) = (1 − (1 − 10^-d)^n) / 2.
pub fn digit_loss_analytic(n: u32, d: u32) -> f64 {
    (1.0 - (1.0 - 10f64.powi(-(d as i32))).powi(n as i32)) / 2.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DigitLossReport {
    pub n: u32,
    pub d: u32,
    pub trials: usize,
    pub analytic: f64,
    pub empirical: f64,
}

/// Analytic value next to a Monte Carlo of the idealized model.
///
/// A trial makes n additions of two random numbers whose signs and leading
/// digits are independent and uniform. An addition cancels at least d
/// leading digits when the signs differ and the first d digits agree; the
/// trial counts if any of its n additions does.
pub fn digit_loss_probability(n: u32, d: u32, trials: usize, seed: u64) -> Result<DigitLossReport> {
    if n == 0 || d == 0 || trials == 0 {
        return Err(Error::invalid("digit-loss experiment needs n, d, trials >= 1"));
    }
    if d > 15 {
        return Err(Error::invalid("at most 15 digits are modelled"));
    }
    let mut rng = SeededRng::new(seed).fork("digit-loss");
    let top = 10i64.pow(d) - 1;
    let mut hits = 0usize;
    for _ in 0..trials {
        let lost = (0..n).any(|_| {
            let opposite = rng.bit() != rng.bit();
            let same = rng.int_inclusive(0, top) == rng.int_inclusive(0, top);
            opposite && same
        });
        if lost {
            hits += 1;
        }
    }
    Ok(DigitLossReport {
        n,
        d,
        trials,
        analytic: digit_loss_analytic(n, d),
        empirical: hits as f64 / trials as f64,
    })
}
