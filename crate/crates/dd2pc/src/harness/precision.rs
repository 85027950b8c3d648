use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::DeltaRange;
use crate::error::{Error, Result};
use crate::numerics::{SeededRng, SplitMode, Vector};
use crate::runtime::SessionConfig;
use crate::s2pm::ProtocolConfig;
use crate::vector::{run_reconstructed, VectorProtocol};

/// |a+b| at or beyond this counts as the saturated sigmoid regime.
pub const SIGMOID_SATURATION: f64 = 100.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrecisionOptions {
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub protocol: ProtocolConfig,
    /// Fan trials across the rayon pool.
    pub parallel: bool,
}

impl PrecisionOptions {
    pub fn new(n: usize, trials: usize, seed: u64) -> Self {
        PrecisionOptions {
            n,
            trials,
            seed,
            protocol: ProtocolConfig::default(),
            parallel: false,
        }
    }
}

/// Error statistics for one δ-range.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RangeResult {
    pub x: u32,
    /// Max relative error over the elements it is computed on.
    pub mre: f64,
    /// Mean relative error over the same elements.
    pub are: f64,
    /// Elements entering MRE/ARE.
    pub elements: usize,
    /// Sigmoid only: elements with |a+b| ≥ 100, checked in absolute terms.
    pub saturated: usize,
    pub saturated_max_abs_error: f64,
    /// Smallest and largest reconstructed value seen.
    pub min_value: f64,
    pub max_value: f64,
    /// Reciprocal only: elements redrawn because a+b was below ε_den.
    pub resamples: usize,
    /// Sessions that ended in an error; their elements are not counted.
    pub failed_sessions: usize,
    pub first_failure: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrecisionReport {
    pub protocol: VectorProtocol,
    pub n: usize,
    pub trials: usize,
    pub rho: usize,
    pub split_mode: SplitMode,
    pub ranges: Vec<RangeResult>,
}

impl PrecisionReport {
    pub fn worst_mre(&self) -> f64 {
        self.ranges.iter().map(|r| r.mre).fold(0.0, f64::max)
    }
}

/// Per-trial numbers, merged afterwards.
#[derive(Default)]
struct TrialStats {
    max_rel: f64,
    sum_rel: f64,
    elements: usize,
    saturated: usize,
    sat_abs: f64,
    min_value: f64,
    max_value: f64,
    resamples: usize,
    failure: Option<String>,
}

fn rel_err(got: f64, want: f64) -> f64 {
    if want == 0.0 {
        got.abs()
    } else {
        ((got - want) / want).abs()
    }
}

fn draw_inputs(protocol: VectorProtocol, range: DeltaRange, n: usize, floor: f64, rng: &mut SeededRng) -> (Vec<f64>, Vec<f64>, usize) {
    let mut resamples = 0;
    let mut a = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    for _ in 0..n {
        loop {
            let (x, y) = (range.sample(rng), range.sample(rng));
            if protocol == VectorProtocol::Reciprocal && !((x + y).abs() >= floor) {
                resamples += 1;
                continue;
            }
            a.push(x);
            b.push(y);
            break;
        }
    }
    (a, b, resamples)
}

fn one_trial(protocol: VectorProtocol, range: DeltaRange, opts: &PrecisionOptions, trial: usize) -> TrialStats {
    let base = SeededRng::new(opts.seed).fork(protocol.name()).fork_index("range", range.x as u64);
    let mut rng = base.fork_index("inputs", trial as u64);
    let (a, b, resamples) = draw_inputs(protocol, range, opts.n, opts.protocol.denominator_floor, &mut rng);
    let mut stats = TrialStats {
        min_value: f64::INFINITY,
        max_value: f64::NEG_INFINITY,
        resamples,
        ..TrialStats::default()
    };
    let session_seed = base.fork_index("session", trial as u64).seed();
    let cfg = SessionConfig::new(session_seed).with_protocol(opts.protocol);
    let outcome = Vector::new(a.clone())
        .and_then(|va| Ok((va, Vector::new(b.clone())?)))
        .and_then(|(va, vb)| run_reconstructed(protocol, &cfg, &va, &vb));
    let got = match outcome {
        Ok((v, _)) => v,
        Err(e) => {
            stats.failure = Some(e.to_string());
            return stats;
        }
    };
    for i in 0..opts.n {
        let g = got.get(i);
        let want = protocol.plaintext(a[i], b[i]);
        stats.min_value = stats.min_value.min(g);
        stats.max_value = stats.max_value.max(g);
        if protocol == VectorProtocol::Sigmoid && (a[i] + b[i]).abs() >= SIGMOID_SATURATION {
            stats.saturated += 1;
            stats.sat_abs = stats.sat_abs.max((g - want).abs());
            continue;
        }
        let e = rel_err(g, want);
        stats.max_rel = stats.max_rel.max(e);
        stats.sum_rel += e;
        stats.elements += 1;
    }
    stats
}

fn run_range(protocol: VectorProtocol, range: DeltaRange, opts: &PrecisionOptions) -> RangeResult {
    let trials: Vec<TrialStats> = if opts.parallel {
        (0..opts.trials).into_par_iter().map(|t| one_trial(protocol, range, opts, t)).collect()
    } else {
        (0..opts.trials).map(|t| one_trial(protocol, range, opts, t)).collect()
    };
    let mut r = RangeResult {
        x: range.x,
        mre: 0.0,
        are: 0.0,
        elements: 0,
        saturated: 0,
        saturated_max_abs_error: 0.0,
        min_value: f64::INFINITY,
        max_value: f64::NEG_INFINITY,
        resamples: 0,
        failed_sessions: 0,
        first_failure: None,
    };
    let mut sum = 0.0;
    for t in trials {
        if let Some(f) = t.failure {
            r.failed_sessions += 1;
            r.first_failure.get_or_insert(f);
            continue;
        }
        r.mre = r.mre.max(t.max_rel);
        sum += t.sum_rel;
        r.elements += t.elements;
        r.saturated += t.saturated;
        r.saturated_max_abs_error = r.saturated_max_abs_error.max(t.sat_abs);
        r.min_value = r.min_value.min(t.min_value);
        r.max_value = r.max_value.max(t.max_value);
        r.resamples += t.resamples;
    }
    if r.elements > 0 {
        r.are = sum / r.elements as f64;
    } else {
        // Nothing measured; the NaN keeps an empty range from reading as exact.
        r.mre = f64::NAN;
        r.are = f64::NAN;
    }
    r
}

/// Runs `opts.trials` in-process sessions per range and compares each
/// reconstructed element with the plaintext value.
///
/// Sigmoid elements in the saturated regime are kept out of MRE/ARE, where the
/// tiny σ would turn rounding noise into huge relative errors, and are
/// tracked by their absolute error instead.
pub fn precision_experiment(protocol: VectorProtocol, ranges: &[DeltaRange], opts: &PrecisionOptions) -> Result<PrecisionReport> {
    if opts.trials == 0 || opts.n == 0 {
        return Err(Error::invalid("precision experiment needs trials >= 1 and n >= 1"));
    }
    opts.protocol.validate()?;
    Ok(PrecisionReport {
        protocol,
        n: opts.n,
        trials: opts.trials,
        rho: opts.protocol.split.rho,
        split_mode: opts.protocol.split.mode,
        ranges: ranges.iter().map(|&r| run_range(protocol, r, opts)).collect(),
    })
}
