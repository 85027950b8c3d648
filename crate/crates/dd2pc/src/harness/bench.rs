use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Result, ResultExt};
use crate::logreg::{evaluate, plain_lort, plain_predict, predict_secure, train_secure_with, Dataset, MetricsReport, PartitionedDataset, TrainConfig};
use crate::runtime::{PhaseTimes, SessionConfig, TransportKind};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub dataset: String,
    pub train_rows: usize,
    pub test_rows: usize,
    pub features: usize,
    pub config: TrainConfig,
    /// Training and prediction sessions, both parties summed.
    pub phases: PhaseTimes,
    pub payload_bits: u64,
    pub rounds: u64,
    pub wall: Duration,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LrBenchmark {
    pub bench: BenchReport,
    pub secure: MetricsReport,
    pub plain: MetricsReport,
    /// |secure − plaintext| test accuracy.
    pub accuracy_gap: f64,
    pub max_score_gap: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchOptions {
    pub name: String,
    pub train_rows: usize,
    /// Alice holds columns [0, split_point).
    pub split_point: usize,
    pub threshold: f64,
    pub transport: TransportKind,
}

/// Trains secure and plaintext models with the same config and seed on the
/// first `train_rows` rows and evaluates both on the rest.
pub fn run_lr_benchmark(data: &Dataset, opts: &BenchOptions, cfg: &TrainConfig) -> Result<LrBenchmark> {
    let t0 = Instant::now();
    let (train, test) = data.split_at(opts.train_rows)?;
    let part = PartitionedDataset::from_dataset(&train, opts.split_point)?;
    let session = cfg.session_config().with_transport(opts.transport);
    let run = train_secure_with(&part, cfg, &session).context_with(|| format!("secure training on {}", opts.name))?;

    let test_part = PartitionedDataset::from_dataset(&test, opts.split_point)?;
    let predict_cfg = SessionConfig {
        seed: cfg.seed ^ 0x9e37_79b9_7f4a_7c15,
        ..session.clone()
    };
    let (shares, predict_report) = predict_secure(&test_part.x_a, &test_part.x_b, &run.model, &predict_cfg)
        .context_with(|| format!("secure prediction on {}", opts.name))?;
    let secure_scores = shares.reconstruct()?;

    let w_plain = plain_lort(&train.x, &train.y, cfg)?;
    let plain_scores = plain_predict(&test.x, &w_plain)?;

    let secure = evaluate(&test.y, &secure_scores, opts.threshold)?;
    let plain = evaluate(&test.y, &plain_scores, opts.threshold)?;
    let max_score_gap = secure_scores.sub(&plain_scores)?.max_abs();

    let phases = run.report.phases() + predict_report.phases();
    Ok(LrBenchmark {
        bench: BenchReport {
            dataset: opts.name.clone(),
            train_rows: train.rows(),
            test_rows: test.rows(),
            features: data.features(),
            config: *cfg,
            phases,
            payload_bits: run.report.payload_bits() + predict_report.payload_bits(),
            rounds: run.report.rounds() + predict_report.rounds(),
            wall: t0.elapsed(),
        },
        accuracy_gap: (secure.accuracy - plain.accuracy).abs(),
        max_score_gap,
        secure,
        plain,
    })
}
