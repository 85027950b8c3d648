use crate::error::{Error, Result};
use crate::numerics::{Matrix, SeededRng, U};

/// Inputs to one party's residual probe.
#[derive(Clone, Debug)]
pub struct VerifyBundle {
    vf_a: Matrix,
    vf_b: Matrix,
    st: Matrix,
    rounds: u32,
    inner_dim: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Verdict {
    Accepted,
    Rejected { round: u32, residual: f64, tolerance: f64 },
}

impl Verdict {
    pub fn is_accepted(&self) -> bool {
        matches!(self, Verdict::Accepted)
    }

    pub fn into_result(self) -> Result<()> {
        match self {
            Verdict::Accepted => Ok(()),
            Verdict::Rejected {
                round,
                residual,
                tolerance,
            } => Err(Error::VerificationRejected {
                round,
                residual,
                tolerance,
            }),
        }
    }
}

impl VerifyBundle {
    pub fn new(vf_a: Matrix, vf_b: Matrix, st: Matrix, rounds: u32, inner_dim: usize) -> Result<Self> {
        if vf_a.shape() != vf_b.shape() || vf_a.shape() != st.shape() {
            return Err(Error::shape(
                "verify",
                format!("VF_a {:?}, VF_b {:?}, S_t {:?}", vf_a.shape(), vf_b.shape(), st.shape()),
            ));
        }
        if rounds == 0 {
            return Err(Error::invalid("verification needs at least one round"));
        }
        Ok(VerifyBundle {
            vf_a,
            vf_b,
            st,
            rounds,
            inner_dim,
        })
    }

    /// ε_v = slack·u·s·M·m with M the largest magnitude among the inputs.
    pub fn tolerance(&self, slack: f64) -> f64 {
        let peak = self.vf_a.max_abs().max(self.vf_b.max_abs()).max(self.st.max_abs());
        verify_tolerance(slack, self.inner_dim, self.st.cols(), peak)
    }
}

pub fn verify_tolerance(slack: f64, s: usize, m: usize, magnitude: f64) -> f64 {
    slack * U * s as f64 * magnitude * m as f64
}

/// Probes H = VF_a + VF_b − S_t with random 0/1 column selectors.
///
/// Honest runs leave H at rounding level; any anomaly in V_a + V_b shows up
/// in H and survives a round with probability at most 1/2.
pub fn s2pm_verify(bundle: &VerifyBundle, slack: f64, rng: &mut SeededRng) -> Verdict {
    let tolerance = bundle.tolerance(slack);
    let (n, m) = bundle.st.shape();
    let h: Vec<f64> = bundle
        .vf_a
        .as_slice()
        .iter()
        .zip(bundle.vf_b.as_slice())
        .zip(bundle.st.as_slice())
        .map(|((a, b), s)| a + b - s)
        .collect();
    // All selectors are drawn up front, round-major, and the n×l products
    // E = H·Δ come out of one pass over H.
    let l = bundle.rounds as usize;
    let mut delta = vec![0.0f64; m * l];
    for r in 0..l {
        for j in 0..m {
            delta[j * l + r] = if rng.bit() { 1.0 } else { 0.0 };
        }
    }
    let mut e = vec![0.0f64; n * l];
    for (erow, hrow) in e.chunks_exact_mut(l).zip(h.chunks_exact(m)) {
        for (&hv, drow) in hrow.iter().zip(delta.chunks_exact(l)) {
            for (acc, d) in erow.iter_mut().zip(drow) {
                *acc += hv * d;
            }
        }
    }
    for round in 0..l {
        let mut residual = 0.0f64;
        for i in 0..n {
            let x = e[i * l + round];
            if !x.is_finite() {
                residual = f64::INFINITY;
                break;
            }
            residual = residual.max(x.abs());
        }
        if !(residual <= tolerance) {
            return Verdict::Rejected {
                round: round as u32,
                residual,
                tolerance,
            };
        }
    }
    Verdict::Accepted
}
