//! Experiment drivers: precision sweeps, verification soundness and cost,
//! the masking-security and digit-loss laws, and logistic regression
//! benchmarks. Every report serializes to JSON inside an [`Envelope`].

mod bench;
mod delta;
mod digits;
mod precision;
mod report;
mod security;
mod synth;
mod verification;

pub use bench::{run_lr_benchmark, BenchOptions, BenchReport, LrBenchmark};
pub use delta::DeltaRange;
pub use digits::{digit_loss_analytic, digit_loss_probability, DigitLossReport};
pub use precision::{precision_experiment, PrecisionOptions, PrecisionReport, RangeResult, SIGMOID_SATURATION};
pub use report::{Envelope, Tabular, SCHEMA_VERSION};
pub use security::{fixed_a_law, support_law, security_theta_probability, SecurityReport};
pub use synth::{synthetic_dataset, SynthSpec};
pub use verification::{verification_failure_experiment, verification_proportion, FaultOptions, ProportionRow, VerifyFailReport};
