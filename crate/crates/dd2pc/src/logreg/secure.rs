use std::path::Path;

use serde::{Deserialize, Serialize};

use super::data::PartitionedDataset;
use super::plain::{batches, TrainConfig};
use crate::error::{Error, Result, ResultExt};
use crate::numerics::{Matrix, Vector};
use crate::runtime::{run_pair, PartySession, SessionConfig, SessionReport};
use crate::s2pm::{s2phm, Plan};
use crate::transport::Role;
use crate::vector::{s2ps, AddShares};

/// Additive shares of ŵ, bias first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelShares {
    pub w_a: Vector,
    pub w_b: Vector,
}

impl ModelShares {
    pub fn zeros(d: usize) -> Self {
        ModelShares {
            w_a: Vector::zeros(d + 1),
            w_b: Vector::zeros(d + 1),
        }
    }

    pub fn merged(&self) -> Result<Vector> {
        self.w_a.add(&self.w_b)
    }

    pub fn features(&self) -> usize {
        self.w_a.len() - 1
    }
}

/// What gets written to disk after training.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub w_a: Vec<f64>,
    pub w_b: Vec<f64>,
    pub w: Vec<f64>,
    pub config: TrainConfig,
}

impl ModelFile {
    pub fn new(model: &ModelShares, config: TrainConfig) -> Result<Self> {
        Ok(ModelFile {
            w_a: model.w_a.as_slice().to_vec(),
            w_b: model.w_b.as_slice().to_vec(),
            w: model.merged()?.into_vec(),
            config,
        })
    }

    pub fn shares(&self) -> Result<ModelShares> {
        if self.w_a.len() != self.w_b.len() || self.w_a.len() < 2 {
            return Err(Error::Malformed("model shares must have equal length >= 2".into()));
        }
        Ok(ModelShares {
            w_a: Vector::new(self.w_a.clone())?,
            w_b: Vector::new(self.w_b.clone())?,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}

/// Triples consumed by one training run.
pub fn train_plan(n: usize, d: usize, cfg: &TrainConfig) -> Result<Plan> {
    let mut plan = Plan::new();
    for &(lo, hi) in &batches(n, cfg.batch_size)? {
        let ni = hi - lo;
        plan = plan
            .then(Plan::s2phm(ni, d + 1, 1))
            .then(Plan::s2ps(ni, cfg.rho))
            .then(Plan::s2phm(d + 1, ni, 1));
    }
    Ok(plan.repeat(cfg.iterations))
}

pub fn predict_plan(n: usize, d: usize, rho: usize) -> Plan {
    Plan::s2phm(n, d + 1, 1).then(Plan::s2ps(n, rho))
}

/// [1, X_a] for Alice, [0, X_b] for Bob.
fn augment_share(sess: &PartySession, x: &Matrix) -> Matrix {
    x.prepend_column(if sess.role() == Role::Alice { 1.0 } else { 0.0 })
}

/// σ(X̂·ŵ) share for rows already augmented.
fn forward(sess: &mut PartySession, xh: &Matrix, w: &Vector) -> Result<Vector> {
    let z = s2phm(sess, xh, &w.to_column())?.to_vector()?;
    s2ps(sess, &z)
}

/// One party's side of secure training. `x` is this party's share of the
/// design matrix; labels are public. Returns this party's share of ŵ after
/// every iteration.
pub fn s2plort(sess: &mut PartySession, x: &Matrix, y: &Vector, cfg: &TrainConfig) -> Result<Vec<Vector>> {
    cfg.validate()?;
    if x.rows() != y.len() {
        return Err(Error::shape("s2plort", format!("{} rows but {} labels", x.rows(), y.len())));
    }
    let alice = sess.role() == Role::Alice;
    let xh = augment_share(sess, x);
    let ranges = batches(x.rows(), cfg.batch_size)?;
    let mut w = Vector::zeros(xh.cols());
    let mut out = Vec::with_capacity(cfg.iterations);
    for it in 0..cfg.iterations {
        for (bi, &(lo, hi)) in ranges.iter().enumerate() {
            let mut step = || -> Result<Vector> {
                let xb = xh.row_range(lo, hi)?;
                let mut yh = forward(sess, &xb, &w)?;
                if alice {
                    yh = yh.sub(&Vector::from_raw(y.as_slice()[lo..hi].to_vec()))?;
                }
                let g = s2phm(sess, &xb.transpose(), &yh.to_column())?.to_vector()?;
                Ok(g.scale(1.0 / (hi - lo) as f64))
            };
            let g = step().context_with(|| format!("iteration {it} batch {bi}"))?;
            w = w.sub(&g.scale(cfg.eta))?;
        }
        out.push(w.clone());
    }
    Ok(out)
}

/// One party's side of secure prediction: returns its share of σ(X̂*·ŵ).
pub fn s2plorp(sess: &mut PartySession, x: &Matrix, w: &Vector) -> Result<Vector> {
    if x.cols() + 1 != w.len() {
        return Err(Error::shape("s2plorp", format!("{} features for {} weights", x.cols(), w.len())));
    }
    let xh = augment_share(sess, x);
    forward(sess, &xh, w).context_with(|| "prediction")
}

/// Secure training outcome with the reconstructed trajectory.
#[derive(Clone, Debug)]
pub struct TrainRun {
    pub model: ModelShares,
    pub trajectory: Vec<Vector>,
    pub report: SessionReport,
}

pub fn train_secure(data: &PartitionedDataset, cfg: &TrainConfig) -> Result<TrainRun> {
    train_secure_with(data, cfg, &cfg.session_config())
}

pub fn train_secure_with(data: &PartitionedDataset, cfg: &TrainConfig, session: &SessionConfig) -> Result<TrainRun> {
    let plan = train_plan(data.rows(), data.features(), cfg)?;
    let y = &data.y;
    let run = run_pair(
        session,
        &plan,
        |s| s2plort(s, &data.x_a, y, cfg),
        |s| s2plort(s, &data.x_b, y, cfg),
    )?;
    let trajectory = run
        .alice
        .iter()
        .zip(&run.bob)
        .map(|(a, b)| a.add(b))
        .collect::<Result<Vec<_>>>()?;
    let model = ModelShares {
        w_a: run.alice.last().expect("iterations >= 1").clone(),
        w_b: run.bob.last().expect("iterations >= 1").clone(),
    };
    Ok(TrainRun {
        model,
        trajectory,
        report: run.report,
    })
}

pub fn predict_secure(x_a: &Matrix, x_b: &Matrix, model: &ModelShares, session: &SessionConfig) -> Result<(AddShares, SessionReport)> {
    if x_a.shape() != x_b.shape() {
        return Err(Error::shape("predict_secure", format!("{:?} vs {:?}", x_a.shape(), x_b.shape())));
    }
    let plan = predict_plan(x_a.rows(), x_a.cols(), session.protocol.split.rho);
    let run = run_pair(
        session,
        &plan,
        |s| s2plorp(s, x_a, &model.w_a),
        |s| s2plorp(s, x_b, &model.w_b),
    )?;
    Ok((
        AddShares {
            v_a: run.alice,
            v_b: run.bob,
        },
        run.report,
    ))
}

/// ‖secure − plain‖∞ / ‖plain‖∞ per iteration (absolute when plain is zero).
pub fn trajectory_drift(secure: &[Vector], plain: &[Vector]) -> Result<Vec<f64>> {
    if secure.len() != plain.len() {
        return Err(Error::shape("trajectory", format!("{} vs {} iterations", secure.len(), plain.len())));
    }
    secure
        .iter()
        .zip(plain)
        .map(|(s, p)| {
            let diff = s.sub(p)?.max_abs();
            let scale = p.max_abs();
            Ok(if scale > 0.0 { diff / scale } else { diff })
        })
        .collect()
}
