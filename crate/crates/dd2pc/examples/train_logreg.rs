//! Vertically partitioned logistic regression next to the plaintext oracle.
//!
//! cargo run --release --example train_logreg -- [path.csv]
//!
//! Without a path a synthetic set shaped like Raisin (900×7) is used.

use dd2pc::harness::{run_lr_benchmark, synthetic_dataset, BenchOptions, SynthSpec};
use dd2pc::logreg::{Dataset, MinMaxScaler, TrainConfig};
use dd2pc::runtime::TransportKind;

fn main() -> dd2pc::Result<()> {
    let mut data = match std::env::args().nth(1) {
        Some(p) => Dataset::load_csv(p)?,
        None => synthetic_dataset(SynthSpec::RAISIN, 11)?,
    };
    let train_rows = data.rows() * 4 / 5;
    let scaler = MinMaxScaler::fit(&data.split_at(train_rows)?.0.x);
    data.x = scaler.transform(&data.x)?;

    let cfg = TrainConfig {
        seed: 11,
        ..TrainConfig::default()
    };
    let opts = BenchOptions {
        name: "example".into(),
        train_rows,
        split_point: data.features() / 2,
        threshold: 0.5,
        transport: TransportKind::Mem,
    };
    let r = run_lr_benchmark(&data, &opts, &cfg)?;
    println!("train {} / test {}, {} features", r.bench.train_rows, r.bench.test_rows, r.bench.features);
    println!("secure : acc {:.4}  f1 {:.4}  auc {:.4}", r.secure.accuracy, r.secure.f1, r.secure.auc);
    println!("plain  : acc {:.4}  f1 {:.4}  auc {:.4}", r.plain.accuracy, r.plain.f1, r.plain.auc);
    println!("max score gap {:e}", r.max_score_gap);
    println!(
        "{} rounds, {:.1} MB payload, {:.2?} wall",
        r.bench.rounds,
        r.bench.payload_bits as f64 / 8e6,
        r.bench.wall
    );
    Ok(())
}
