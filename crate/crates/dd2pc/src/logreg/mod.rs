//! Two-party logistic regression over additively shared features.
//!
//! The secure trainer and its plaintext twin share batching, zero start and
//! update rule, so the plaintext run is a step-by-step oracle.

mod data;
mod metrics;
mod plain;
mod secure;

pub use data::{vertical_partition, Dataset, MinMaxScaler, PartitionedDataset};
pub use metrics::{evaluate, roc_auc, Confusion, MetricsReport};
pub use plain::{augment, batches, log_loss, plain_lort, plain_lort_trajectory, plain_predict, sigmoid, TrainConfig};
pub use secure::{
    predict_plan, predict_secure, s2plort, s2plorp, train_plan, train_secure, train_secure_with, trajectory_drift,
    ModelFile, ModelShares, TrainRun,
};
