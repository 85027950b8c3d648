use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{mask_bound, Interval, SplitParams};

/// Sampling range for CS masks and for the right party's output share V_b.
///
/// Masks and V_b are drawn from the zero-centred interval whose width is
/// `theta` times the width of `range`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaskConfig {
    pub range: Interval,
    pub theta: f64,
}

impl Default for MaskConfig {
    fn default() -> Self {
        MaskConfig {
            range: Interval { lo: -1.0, hi: 1.0 },
            theta: 1.0,
        }
    }
}

impl MaskConfig {
    pub fn new(range: Interval, theta: f64) -> Result<Self> {
        let c = MaskConfig { range, theta };
        c.bound()?;
        Ok(c)
    }

    /// Half-width of the mask interval.
    pub fn bound(&self) -> Result<f64> {
        Interval::new(self.range.lo, self.range.hi)?;
        mask_bound(&self.range, self.theta)
    }
}

/// Knobs shared by every protocol in a session.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub split: SplitParams,
    pub mask: MaskConfig,
    /// Verification rounds l. Zero skips verification entirely.
    pub verify_rounds: u32,
    /// Multiplier in ε_v = slack·u·s·M·m.
    pub verify_slack: f64,
    /// One CS bundle per party for the whole plan instead of one per triple.
    pub batch_preprocessing: bool,
    /// ε_den for the reciprocal protocol.
    pub denominator_floor: f64,
    /// Per-share clamp applied before e^{-x} in the sigmoid protocol.
    pub exp_clamp: f64,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        ProtocolConfig {
            split: SplitParams::default(),
            mask: MaskConfig::default(),
            verify_rounds: 20,
            verify_slack: 1024.0,
            batch_preprocessing: true,
            denominator_floor: 1e-12,
            exp_clamp: 350.0,
        }
    }
}

impl ProtocolConfig {
    pub fn validate(&self) -> Result<()> {
        self.split.validate()?;
        self.mask.bound()?;
        if !(self.verify_slack > 0.0) {
            return Err(Error::invalid("verify_slack must be positive"));
        }
        if !(self.denominator_floor > 0.0) {
            return Err(Error::invalid("denominator_floor must be positive"));
        }
        // Two clamped shares multiply to at most e^(2·clamp); past ~354 the
        // off-diagonal products of the Hadamard lift overflow.
        if !(self.exp_clamp > 0.0 && self.exp_clamp <= 350.0) {
            return Err(Error::invalid("exp_clamp must lie in (0, 350]"));
        }
        Ok(())
    }

    pub fn with_rho(mut self, rho: usize) -> Self {
        self.split.rho = rho;
        self
    }

    pub fn with_verify_rounds(mut self, l: u32) -> Self {
        self.verify_rounds = l;
        self
    }

    pub fn with_batching(mut self, batched: bool) -> Self {
        self.batch_preprocessing = batched;
        self
    }

    pub fn with_mask(mut self, mask: MaskConfig) -> Self {
        self.mask = mask;
        self
    }
}
