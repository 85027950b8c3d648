use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::DeltaRange;
use crate::error::{Error, Result};
use crate::numerics::{Matrix, SeededRng};
use crate::runtime::{run_pair_outcomes, PhaseTimes, SessionConfig};
use crate::s2pm::{s2pm, FaultInjection, FaultTarget, Plan, ProtocolConfig};
use crate::transport::Role;
use crate::vector::VectorProtocol;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FaultOptions {
    /// S2PM shape n×s times s×m.
    pub shape: (usize, usize, usize),
    pub target: FaultTarget,
    pub parallel: bool,
}

impl Default for FaultOptions {
    fn default() -> Self {
        FaultOptions {
            shape: (4, 4, 4),
            target: FaultTarget::CorrectionVf,
            parallel: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyFailReport {
    pub l: u32,
    pub trials: usize,
    /// Zero is an honest control run.
    pub magnitude: f64,
    pub alice_accepted: usize,
    pub bob_accepted: usize,
    pub both_accepted: usize,
    /// Sessions that failed for a reason other than a verification verdict.
    pub other_errors: usize,
    /// both_accepted / trials.
    pub miss_rate: f64,
    /// 4^-l.
    pub bound: f64,
    /// Binomial standard error at the bound.
    pub sigma: f64,
    pub within_bound: bool,
}

enum Side {
    Accepted,
    Rejected,
    Other,
}

fn classify<T>(r: &Result<T>) -> Side {
    match r {
        Ok(_) => Side::Accepted,
        Err(e) if matches!(e.root(), Error::VerificationRejected { .. }) => Side::Rejected,
        Err(_) => Side::Other,
    }
}

fn fault_trial(l: u32, magnitude: f64, opts: &FaultOptions, seed: u64, trial: usize) -> Result<(bool, bool, bool)> {
    let (n, s, m) = opts.shape;
    let mut rng = SeededRng::new(seed).fork_index("verify-fail", trial as u64);
    let range = DeltaRange { x: 0 };
    let a = Matrix::from_fn(n, s, |_, _| range.sample(&mut rng));
    let b = Matrix::from_fn(s, m, |_, _| range.sample(&mut rng));
    let fault = (magnitude != 0.0).then(|| FaultInjection {
        target: opts.target,
        row: rng.below(n),
        col: rng.below(m),
        magnitude,
    });
    let cfg = SessionConfig::new(rng.fork("session").seed())
        .with_protocol(ProtocolConfig::default().with_verify_rounds(l));
    let plan = Plan::s2pm(n, s, m, Role::Alice);
    let (ra, rb, _) = run_pair_outcomes(
        &cfg,
        &plan,
        |sess| s2pm(sess, Role::Alice, &a),
        |sess| {
            if let Some(f) = fault {
                sess.arm_fault(f);
            }
            s2pm(sess, Role::Alice, &b)
        },
    )?;
    let (ca, cb) = (classify(&ra), classify(&rb));
    let other = matches!(ca, Side::Other) || matches!(cb, Side::Other);
    Ok((matches!(ca, Side::Accepted), matches!(cb, Side::Accepted), other))
}

/// Tampers one entry of the right party's correction in every trial and
/// counts how often both parties still accept.
pub fn verification_failure_experiment(l: u32, magnitude: f64, trials: usize, seed: u64, opts: &FaultOptions) -> Result<VerifyFailReport> {
    if l == 0 {
        return Err(Error::invalid("verification failure needs l >= 1"));
    }
    if trials == 0 || !magnitude.is_finite() {
        return Err(Error::invalid("need trials >= 1 and a finite magnitude"));
    }
    let outcomes: Vec<Result<(bool, bool, bool)>> = if opts.parallel {
        (0..trials).into_par_iter().map(|t| fault_trial(l, magnitude, opts, seed, t)).collect()
    } else {
        (0..trials).map(|t| fault_trial(l, magnitude, opts, seed, t)).collect()
    };
    let mut r = VerifyFailReport {
        l,
        trials,
        magnitude,
        alice_accepted: 0,
        bob_accepted: 0,
        both_accepted: 0,
        other_errors: 0,
        miss_rate: 0.0,
        bound: 4f64.powi(-(l as i32)),
        sigma: 0.0,
        within_bound: false,
    };
    for o in outcomes {
        let (a, b, other) = o?;
        r.alice_accepted += a as usize;
        r.bob_accepted += b as usize;
        r.both_accepted += (a && b) as usize;
        r.other_errors += other as usize;
    }
    r.miss_rate = r.both_accepted as f64 / trials as f64;
    r.sigma = (r.bound * (1.0 - r.bound) / trials as f64).sqrt();
    r.within_bound = r.miss_rate <= r.bound + 3.0 * r.sigma;
    Ok(r)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProportionRow {
    pub dim: usize,
    pub l: u32,
    pub repeats: usize,
    /// Both parties, summed over repeats.
    pub phases: PhaseTimes,
    pub verification_share: f64,
}

/// Verification share of session time for each (dimension, l).
pub fn verification_proportion(protocol: VectorProtocol, dims: &[usize], l_values: &[u32], repeats: usize, seed: u64) -> Result<Vec<ProportionRow>> {
    if repeats == 0 {
        return Err(Error::invalid("repeats must be >= 1"));
    }
    let range = DeltaRange { x: 4 };
    let mut rows = Vec::new();
    for &dim in dims {
        for &l in l_values {
            let mut phases = PhaseTimes::default();
            for rep in 0..repeats {
                let mut rng = SeededRng::new(seed).fork_index("proportion", (dim * 1000 + rep) as u64);
                let (a, b) = if protocol == VectorProtocol::Reciprocal {
                    // Keep sums away from zero so the guard never fires.
                    let a = range.vector(dim, &mut rng)?.map(f64::abs);
                    (a.clone(), a)
                } else {
                    (range.vector(dim, &mut rng)?, range.vector(dim, &mut rng)?)
                };
                let cfg = SessionConfig::new(rng.seed()).with_protocol(ProtocolConfig::default().with_verify_rounds(l));
                let (_, report) = crate::vector::run_reconstructed(protocol, &cfg, &a, &b)?;
                phases = phases + report.alice.phases + report.bob.phases;
            }
            rows.push(ProportionRow {
                dim,
                l,
                repeats,
                phases,
                verification_share: phases.verification_share(),
            });
        }
    }
    Ok(rows)
}
