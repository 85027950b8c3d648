use serde::{Deserialize, Serialize};

use super::{Matrix, SeededRng};
use crate::error::{Error, Result};

/// Closed interval `[lo, hi]` with `lo < hi`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::invalid(format!("bad interval [{lo}, {hi}]")));
        }
        Ok(Interval { lo, hi })
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Half-width of the mask range for data in `range` expanded by `theta`.
///
/// Masks are centred on zero: a constant shift would add a rank-one term and
/// undo the rank deficiency.
pub fn mask_bound(range: &Interval, theta: f64) -> Result<f64> {
    if !(theta >= 1.0) || !theta.is_finite() {
        return Err(Error::invalid(format!("mask theta must be finite and >= 1, got {theta}")));
    }
    Ok(theta * range.width() / 2.0)
}

/// Random rows×cols matrix of rank at most `rank`, scaled so that its largest
/// entry has magnitude `bound`.
pub(crate) fn low_rank(rows: usize, cols: usize, rank: usize, bound: f64, rng: &mut SeededRng) -> Matrix {
    debug_assert!(rank >= 1 && rank <= rows.min(cols));
    loop {
        let u = Matrix::from_raw(rows, rank, rng.uniform_vec(rows * rank, -1.0, 1.0));
        let v = Matrix::from_raw(rank, cols, rng.uniform_vec(rank * cols, -1.0, 1.0));
        let m = u.matmul(&v).expect("factor shapes agree");
        let peak = m.max_abs();
        if peak > 0.0 {
            return m.scale(bound / peak);
        }
    }
}

/// Mask of rank at most `min(rows, cols) - 1` with entries in the
/// θ-expanded, zero-centred version of `data_range`.
pub fn gen_rank_deficient(
    rows: usize,
    cols: usize,
    data_range: &Interval,
    theta: f64,
    rng: &mut SeededRng,
) -> Result<Matrix> {
    if rows.min(cols) < 2 {
        return Err(Error::invalid(format!(
            "rank-deficient mask needs min(rows, cols) >= 2, got {rows}x{cols}"
        )));
    }
    let bound = mask_bound(data_range, theta)?;
    Ok(low_rank(rows, cols, rows.min(cols) - 1, bound, rng))
}
