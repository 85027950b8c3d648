//! Vector protocols on top of S2PM: Hadamard product, addition-to-product
//! conversion, reciprocal and sigmoid of a shared sum.
//!
//! Each protocol is a per-party function over a [`PartySession`]; the
//! `run_*` helpers drive both parties in-process for tests and experiments.

mod protocols;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use protocols::{s2patp, s2php, s2pr, s2ps};

use crate::error::{Error, Result};
use crate::runtime::{run_pair, PartySession, SessionConfig, SessionReport};
use crate::s2pm::Plan;
use crate::numerics::Vector;

/// v_a + v_b is the target.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AddShares {
    pub v_a: Vector,
    pub v_b: Vector,
}

impl AddShares {
    pub fn reconstruct(&self) -> Result<Vector> {
        self.v_a.add(&self.v_b)
    }
}

/// v_a ⊙ v_b is the target.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MulShares {
    pub v_a: Vector,
    pub v_b: Vector,
}

impl MulShares {
    pub fn reconstruct(&self) -> Result<Vector> {
        self.v_a.hadamard(&self.v_b)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VectorProtocol {
    Hadamard,
    AddToProduct,
    Reciprocal,
    Sigmoid,
}

impl VectorProtocol {
    pub const ALL: [VectorProtocol; 4] = [
        VectorProtocol::Hadamard,
        VectorProtocol::AddToProduct,
        VectorProtocol::Reciprocal,
        VectorProtocol::Sigmoid,
    ];

    pub fn name(self) -> &'static str {
        match self {
            VectorProtocol::Hadamard => "s2php",
            VectorProtocol::AddToProduct => "s2patp",
            VectorProtocol::Reciprocal => "s2pr",
            VectorProtocol::Sigmoid => "s2ps",
        }
    }

    pub fn plan(self, n: usize, rho: usize) -> Plan {
        match self {
            VectorProtocol::Hadamard => Plan::s2php(n, rho),
            VectorProtocol::AddToProduct => Plan::s2patp(n, rho),
            VectorProtocol::Reciprocal => Plan::s2pr(n, rho),
            VectorProtocol::Sigmoid => Plan::s2ps(n, rho),
        }
    }

    /// Runs this party's side.
    pub fn party(self, sess: &mut PartySession, x: &Vector) -> Result<Vector> {
        match self {
            VectorProtocol::Hadamard => s2php(sess, x),
            VectorProtocol::AddToProduct => s2patp(sess, x),
            VectorProtocol::Reciprocal => s2pr(sess, x),
            VectorProtocol::Sigmoid => s2ps(sess, x),
        }
    }

    /// Plaintext value the shares should reconstruct to.
    pub fn plaintext(self, a: f64, b: f64) -> f64 {
        match self {
            VectorProtocol::Hadamard => a * b,
            VectorProtocol::AddToProduct => a + b,
            VectorProtocol::Reciprocal => 1.0 / (a + b),
            VectorProtocol::Sigmoid => 1.0 / (1.0 + (-(a + b)).exp()),
        }
    }

    /// Combines outputs the way this protocol shares them.
    pub fn reconstruct(self, v_a: &Vector, v_b: &Vector) -> Result<Vector> {
        match self {
            VectorProtocol::AddToProduct => v_a.hadamard(v_b),
            _ => v_a.add(v_b),
        }
    }
}

impl fmt::Display for VectorProtocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for VectorProtocol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        VectorProtocol::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::invalid(format!("unknown protocol {s:?} (s2php, s2patp, s2pr, s2ps)")))
    }
}

fn run_vector(protocol: VectorProtocol, cfg: &SessionConfig, a: &Vector, b: &Vector) -> Result<(Vector, Vector, SessionReport)> {
    if a.len() != b.len() {
        return Err(Error::shape(protocol.name(), format!("lengths {} and {}", a.len(), b.len())));
    }
    let plan = protocol.plan(a.len(), cfg.protocol.split.rho);
    let run = run_pair(cfg, &plan, |s| protocol.party(s, a), |s| protocol.party(s, b))?;
    Ok((run.alice, run.bob, run.report))
}

pub fn run_s2php(cfg: &SessionConfig, a: &Vector, b: &Vector) -> Result<(AddShares, SessionReport)> {
    let (v_a, v_b, r) = run_vector(VectorProtocol::Hadamard, cfg, a, b)?;
    Ok((AddShares { v_a, v_b }, r))
}

pub fn run_s2patp(cfg: &SessionConfig, a: &Vector, b: &Vector) -> Result<(MulShares, SessionReport)> {
    let (v_a, v_b, r) = run_vector(VectorProtocol::AddToProduct, cfg, a, b)?;
    Ok((MulShares { v_a, v_b }, r))
}

pub fn run_s2pr(cfg: &SessionConfig, a: &Vector, b: &Vector) -> Result<(AddShares, SessionReport)> {
    let (v_a, v_b, r) = run_vector(VectorProtocol::Reciprocal, cfg, a, b)?;
    Ok((AddShares { v_a, v_b }, r))
}

pub fn run_s2ps(cfg: &SessionConfig, a: &Vector, b: &Vector) -> Result<(AddShares, SessionReport)> {
    let (v_a, v_b, r) = run_vector(VectorProtocol::Sigmoid, cfg, a, b)?;
    Ok((AddShares { v_a, v_b }, r))
}

/// Runs any of the four and returns the reconstruction.
pub fn run_reconstructed(protocol: VectorProtocol, cfg: &SessionConfig, a: &Vector, b: &Vector) -> Result<(Vector, SessionReport)> {
    let (v_a, v_b, r) = run_vector(protocol, cfg, a, b)?;
    Ok((protocol.reconstruct(&v_a, &v_b)?, r))
}
