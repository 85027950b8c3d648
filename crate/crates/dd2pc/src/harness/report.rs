use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{DigitLossReport, LrBenchmark, PrecisionReport, ProportionRow, SecurityReport, VerifyFailReport};
use crate::error::Result;

pub const SCHEMA_VERSION: u32 = 1;

/// JSON envelope around every report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Envelope<T> {
    pub schema_version: u32,
    pub kind: String,
    pub data: T,
}

impl<T: Serialize> Envelope<T> {
    pub fn new(kind: &str, data: T) -> Self {
        Envelope {
            schema_version: SCHEMA_VERSION,
            kind: kind.to_string(),
            data,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }
}

/// Reports with a flat table form; written next to the JSON as CSV.
pub trait Tabular {
    fn header(&self) -> Vec<String>;
    fn rows(&self) -> Vec<Vec<String>>;

    fn write_csv(&self, path: impl AsRef<Path>) -> Result<()>
    where
        Self: Sized,
    {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(self.header())?;
        for r in self.rows() {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn strings<const N: usize>(xs: [&str; N]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

impl Tabular for Vec<PrecisionReport> {
    fn header(&self) -> Vec<String> {
        strings(["protocol", "x", "mre", "are", "elements", "saturated", "saturated_max_abs_error", "resamples", "failed_sessions"])
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.iter()
            .flat_map(|p| {
                p.ranges.iter().map(move |r| {
                    vec![
                        p.protocol.to_string(),
                        r.x.to_string(),
                        format!("{:e}", r.mre),
                        format!("{:e}", r.are),
                        r.elements.to_string(),
                        r.saturated.to_string(),
                        format!("{:e}", r.saturated_max_abs_error),
                        r.resamples.to_string(),
                        r.failed_sessions.to_string(),
                    ]
                })
            })
            .collect()
    }
}

impl Tabular for Vec<SecurityReport> {
    fn header(&self) -> Vec<String> {
        strings(["theta", "trials", "estimate", "support_law", "fixed_a_law", "within_3sigma_support", "within_3sigma_fixed_a"])
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.iter()
            .map(|r| {
                vec![
                    r.theta.to_string(),
                    r.trials.to_string(),
                    r.estimate.to_string(),
                    r.support_law.to_string(),
                    r.fixed_a_law.to_string(),
                    r.within_3sigma_support.to_string(),
                    r.within_3sigma_fixed_a.to_string(),
                ]
            })
            .collect()
    }
}

impl Tabular for Vec<DigitLossReport> {
    fn header(&self) -> Vec<String> {
        strings(["n", "d", "trials", "analytic", "empirical"])
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.iter()
            .map(|r| vec![r.n.to_string(), r.d.to_string(), r.trials.to_string(), r.analytic.to_string(), r.empirical.to_string()])
            .collect()
    }
}

impl Tabular for Vec<VerifyFailReport> {
    fn header(&self) -> Vec<String> {
        strings(["l", "trials", "magnitude", "both_accepted", "miss_rate", "bound", "sigma", "within_bound"])
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.iter()
            .map(|r| {
                vec![
                    r.l.to_string(),
                    r.trials.to_string(),
                    r.magnitude.to_string(),
                    r.both_accepted.to_string(),
                    r.miss_rate.to_string(),
                    r.bound.to_string(),
                    r.sigma.to_string(),
                    r.within_bound.to_string(),
                ]
            })
            .collect()
    }
}

impl Tabular for Vec<ProportionRow> {
    fn header(&self) -> Vec<String> {
        strings(["dim", "l", "repeats", "offline_s", "online_s", "verification_s", "communication_s", "verification_share"])
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.iter()
            .map(|r| {
                vec![
                    r.dim.to_string(),
                    r.l.to_string(),
                    r.repeats.to_string(),
                    r.phases.offline.as_secs_f64().to_string(),
                    r.phases.online.as_secs_f64().to_string(),
                    r.phases.verification.as_secs_f64().to_string(),
                    r.phases.communication.as_secs_f64().to_string(),
                    r.verification_share.to_string(),
                ]
            })
            .collect()
    }
}

impl Tabular for LrBenchmark {
    fn header(&self) -> Vec<String> {
        strings(["dataset", "model", "accuracy", "precision", "recall", "f1", "auc"])
    }

    fn rows(&self) -> Vec<Vec<String>> {
        [("secure", &self.secure), ("plain", &self.plain)]
            .iter()
            .map(|(name, m)| {
                vec![
                    self.bench.dataset.clone(),
                    name.to_string(),
                    m.accuracy.to_string(),
                    m.precision.to_string(),
                    m.recall.to_string(),
                    m.f1.to_string(),
                    m.auc.to_string(),
                ]
            })
            .collect()
    }
}
