use serde::{Deserialize, Serialize};

use super::{Matrix, SeededRng, Vector};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SplitMode {
    /// Every split carries the sign of the scalar (stick-breaking).
    SignConsistent,
    /// Splits drawn from `[-θ|a|, θ|a|]`; the last one absorbs the residual.
    RangeExpanded,
}

/// How scalars are lifted into split vectors for the Hadamard protocol.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitParams {
    pub rho: usize,
    pub mode: SplitMode,
    pub theta: f64,
}

impl Default for SplitParams {
    fn default() -> Self {
        SplitParams {
            rho: 2,
            mode: SplitMode::SignConsistent,
            theta: 100.0,
        }
    }
}

impl SplitParams {
    pub fn new(rho: usize, mode: SplitMode, theta: f64) -> Result<Self> {
        let p = SplitParams { rho, mode, theta };
        p.validate()?;
        Ok(p)
    }

    pub fn with_rho(rho: usize) -> Result<Self> {
        SplitParams::new(rho, SplitMode::SignConsistent, SplitParams::default().theta)
    }

    pub fn validate(&self) -> Result<()> {
        if self.rho < 2 {
            return Err(Error::invalid(format!("split factor rho must be >= 2, got {}", self.rho)));
        }
        if !(self.theta >= 1.0) || !self.theta.is_finite() {
            return Err(Error::invalid(format!("split theta must be finite and >= 1, got {}", self.theta)));
        }
        Ok(())
    }

    /// Lifted dimension ρ².
    pub fn lifted(&self) -> usize {
        self.rho * self.rho
    }
}

/// Splits `a` into ρ pieces that sum back to `a`.
pub fn split_scalar(a: f64, params: &SplitParams, rng: &mut SeededRng) -> Result<Vector> {
    params.validate()?;
    if !a.is_finite() {
        return Err(Error::NonFinite("split_scalar"));
    }
    let rho = params.rho;
    if a == 0.0 {
        return Ok(Vector::zeros(rho));
    }
    let mut out = vec![0.0; rho];
    match params.mode {
        SplitMode::SignConsistent => loop {
            let w: Vec<f64> = (0..rho).map(|_| rng.unit_open()).collect();
            let total: f64 = w.iter().sum();
            let mut acc = 0.0;
            for j in 0..rho - 1 {
                out[j] = a * (w[j] / total);
                acc += out[j];
            }
            let last = a - acc;
            // A vanishing last weight can round the residual across zero; redraw.
            if last != 0.0 && last.signum() == a.signum() && out[..rho - 1].iter().all(|x| *x != 0.0) {
                out[rho - 1] = last;
                break;
            }
        },
        SplitMode::RangeExpanded => {
            let bound = params.theta * a.abs();
            let mut acc = 0.0;
            for slot in out.iter_mut().take(rho - 1) {
                *slot = rng.uniform(-bound, bound);
                acc += *slot;
            }
            out[rho - 1] = a - acc;
        }
    }
    Ok(Vector::from_raw(out))
}

/// Left lift from explicit splits: row i is ρ copies of `splits[i]`.
pub fn lift_left(splits: &[Vector]) -> Result<Matrix> {
    let rho = uniform_len(splits, "lift_left")?;
    let mut data = Vec::with_capacity(splits.len() * rho * rho);
    for s in splits {
        for _ in 0..rho {
            data.extend_from_slice(s.as_slice());
        }
    }
    Ok(Matrix::from_raw(splits.len(), rho * rho, data))
}

/// Right lift from explicit splits and permutations: column i is the
/// row-major flattening of T_i with `T_i[k][j] = splits[i][perm[(j + k) % ρ]]`.
///
/// The rows of T_i are cyclic shifts of one permutation, so every column of
/// T_i holds each split exactly once and sums to b_i.
pub fn lift_right(splits: &[Vector], perms: &[Vec<usize>]) -> Result<Matrix> {
    let rho = uniform_len(splits, "lift_right")?;
    if perms.len() != splits.len() {
        return Err(Error::shape("lift_right", "one permutation per split vector"));
    }
    for p in perms {
        let mut q = p.clone();
        q.sort_unstable();
        if q != (0..rho).collect::<Vec<_>>() {
            return Err(Error::invalid(format!("not a permutation of 0..{rho}: {p:?}")));
        }
    }
    let n = splits.len();
    let mut m = Matrix::zeros(rho * rho, n);
    for (i, (beta, perm)) in splits.iter().zip(perms).enumerate() {
        for k in 0..rho {
            for j in 0..rho {
                m.set(k * rho + j, i, beta.get(perm[(j + k) % rho]));
            }
        }
    }
    Ok(m)
}

fn uniform_len(splits: &[Vector], op: &'static str) -> Result<usize> {
    let rho = splits.first().map(Vector::len).ok_or_else(|| Error::invalid("no split vectors"))?;
    if splits.iter().any(|s| s.len() != rho) {
        return Err(Error::shape(op, "split vectors differ in length"));
    }
    Ok(rho)
}

/// Alice's lift of `a` into an n×ρ² matrix.
pub fn ra2a(a: &Vector, params: &SplitParams, rng: &mut SeededRng) -> Result<Matrix> {
    let splits = a.iter().map(|x| split_scalar(*x, params, rng)).collect::<Result<Vec<_>>>()?;
    lift_left(&splits)
}

/// Bob's lift of `b` into a ρ²×n matrix.
pub fn rb2b(b: &Vector, params: &SplitParams, rng: &mut SeededRng) -> Result<Matrix> {
    let mut splits = Vec::with_capacity(b.len());
    let mut perms = Vec::with_capacity(b.len());
    for x in b.iter() {
        splits.push(split_scalar(*x, params, rng)?);
        perms.push(rng.permutation(params.rho));
    }
    lift_right(&splits, &perms)
}

pub fn diag2v(m: &Matrix) -> Result<Vector> {
    if m.rows() != m.cols() {
        return Err(Error::shape("diag2v", format!("{}x{} is not square", m.rows(), m.cols())));
    }
    Ok(Vector::from_raw((0..m.rows()).map(|i| m.get(i, i)).collect()))
}

/// Square matrix with `v` on the diagonal and random finite entries elsewhere.
pub fn v2diag(v: &Vector, rng: &mut SeededRng) -> Result<Matrix> {
    if !v.is_finite() {
        return Err(Error::NonFinite("v2diag"));
    }
    let n = v.len();
    let bound = v.max_abs().max(1.0);
    Ok(Matrix::from_fn(n, n, |i, j| if i == j { v.get(i) } else { rng.uniform(-bound, bound) }))
}
