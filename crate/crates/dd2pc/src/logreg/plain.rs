use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{Matrix, Vector};
use crate::runtime::SessionConfig;
use crate::s2pm::ProtocolConfig;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub eta: f64,
    pub batch_size: usize,
    pub iterations: usize,
    pub rho: usize,
    /// Verification rounds per S2PM.
    pub verify_rounds: u32,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            eta: 0.05,
            batch_size: 32,
            iterations: 5,
            rho: 2,
            verify_rounds: 20,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        // η = 0 is let through as a "no movement" run.
        if !(self.eta >= 0.0 && self.eta.is_finite()) {
            return Err(Error::invalid(format!("learning rate must be >= 0, got {}", self.eta)));
        }
        if self.batch_size == 0 || self.iterations == 0 {
            return Err(Error::invalid("batch size and iterations must be >= 1"));
        }
        if self.rho < 2 {
            return Err(Error::invalid(format!("rho must be >= 2, got {}", self.rho)));
        }
        Ok(())
    }

    pub fn session_config(&self) -> SessionConfig {
        SessionConfig::new(self.seed).with_protocol(
            ProtocolConfig::default()
                .with_rho(self.rho)
                .with_verify_rounds(self.verify_rounds),
        )
    }
}

/// Row ranges of the sequential batches. Every batch must have at least two
/// rows: the gradient product contracts over the batch, and a one-row batch
/// would need a triple with shared dimension 1, which has no rank-deficient
/// mask.
pub fn batches(n: usize, batch_size: usize) -> Result<Vec<(usize, usize)>> {
    if n == 0 || batch_size == 0 {
        return Err(Error::invalid("need at least one row and a positive batch size"));
    }
    let out: Vec<(usize, usize)> = (0..n.div_ceil(batch_size))
        .map(|i| (i * batch_size, ((i + 1) * batch_size).min(n)))
        .collect();
    if let Some(&(lo, hi)) = out.iter().find(|(lo, hi)| hi - lo < 2) {
        return Err(Error::invalid(format!(
            "batch rows {lo}..{hi} has fewer than 2 rows; choose a batch size that leaves n mod B != 1"
        )));
    }
    Ok(out)
}

/// [1, X].
pub fn augment(x: &Matrix) -> Matrix {
    x.prepend_column(1.0)
}

pub fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Plaintext mini-batch gradient descent with the same batching, zero start
/// and update as the secure trainer. Returns ŵ after every iteration.
pub fn plain_lort_trajectory(x: &Matrix, y: &Vector, cfg: &TrainConfig) -> Result<Vec<Vector>> {
    cfg.validate()?;
    if x.rows() != y.len() {
        return Err(Error::shape("plain_lort", format!("{} rows but {} labels", x.rows(), y.len())));
    }
    let xh = augment(x);
    let ranges = batches(x.rows(), cfg.batch_size)?;
    let mut w = Matrix::zeros(xh.cols(), 1);
    let mut out = Vec::with_capacity(cfg.iterations);
    for _ in 0..cfg.iterations {
        for &(lo, hi) in &ranges {
            let xb = xh.row_range(lo, hi)?;
            let yb = Matrix::from_raw(hi - lo, 1, y.as_slice()[lo..hi].to_vec());
            let resid = xb.matmul(&w)?.map(sigmoid).sub(&yb)?;
            let grad = xb.transpose().matmul(&resid)?.scale(1.0 / (hi - lo) as f64);
            w = w.sub(&grad.scale(cfg.eta))?;
        }
        out.push(w.to_vector()?);
    }
    Ok(out)
}

pub fn plain_lort(x: &Matrix, y: &Vector, cfg: &TrainConfig) -> Result<Vector> {
    Ok(plain_lort_trajectory(x, y, cfg)?.pop().expect("iterations >= 1"))
}

/// σ([1, X]·ŵ).
pub fn plain_predict(x: &Matrix, w: &Vector) -> Result<Vector> {
    if x.cols() + 1 != w.len() {
        return Err(Error::shape("plain_predict", format!("{} features for {} weights", x.cols(), w.len())));
    }
    augment(x).matmul(&w.to_column())?.map(sigmoid).to_vector()
}

/// Mean logistic loss of ŵ on (X, y).
pub fn log_loss(x: &Matrix, y: &Vector, w: &Vector) -> Result<f64> {
    let p = plain_predict(x, w)?;
    let eps = 1e-300;
    let total: f64 = p
        .iter()
        .zip(y.iter())
        .map(|(&p, &y)| -(y * p.max(eps).ln() + (1.0 - y) * (1.0 - p).max(eps).ln()))
        .sum();
    Ok(total / y.len() as f64)
}
