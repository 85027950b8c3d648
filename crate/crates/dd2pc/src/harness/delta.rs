use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{SeededRng, Vector};

/// Test values ±1.a₁…a₁₅ × 10^δ with δ uniform over the integers in [−x, x].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaRange {
    pub x: u32,
}

impl DeltaRange {
    /// The five ranges of the precision study.
    pub const SWEEP: [DeltaRange; 5] = [
        DeltaRange { x: 0 },
        DeltaRange { x: 2 },
        DeltaRange { x: 4 },
        DeltaRange { x: 6 },
        DeltaRange { x: 8 },
    ];

    pub fn new(x: u32) -> Result<Self> {
        if x > 300 {
            return Err(Error::invalid(format!("exponent bound {x} leaves the f64 range")));
        }
        Ok(DeltaRange { x })
    }

    pub fn sample(&self, rng: &mut SeededRng) -> f64 {
        let x = self.x as i64;
        let delta = rng.int_inclusive(-x, x) as i32;
        // Fifteen uniform fractional digits.
        let digits = rng.int_inclusive(0, 999_999_999_999_999) as f64;
        let mantissa = 1.0 + digits * 1e-15;
        rng.sign() * mantissa * 10f64.powi(delta)
    }

    pub fn vector(&self, n: usize, rng: &mut SeededRng) -> Result<Vector> {
        Vector::new((0..n).map(|_| self.sample(rng)).collect())
    }
}
