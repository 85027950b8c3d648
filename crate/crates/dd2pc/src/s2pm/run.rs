use super::{s2phm, s2pm, Plan};
use crate::error::{Error, Result};
use crate::numerics::Matrix;
use crate::runtime::{run_pair, SessionConfig, SessionReport};
use crate::transport::Role;

/// A×B with Alice holding A and Bob holding B, both parties in-process.
/// Returns (V_a, V_b).
pub fn run_s2pm(cfg: &SessionConfig, a: &Matrix, b: &Matrix) -> Result<(Matrix, Matrix, SessionReport)> {
    if a.cols() != b.rows() {
        return Err(Error::shape("s2pm", format!("{:?} × {:?}", a.shape(), b.shape())));
    }
    let plan = Plan::s2pm(a.rows(), a.cols(), b.cols(), Role::Alice);
    let run = run_pair(cfg, &plan, |s| s2pm(s, Role::Alice, a), |s| s2pm(s, Role::Alice, b))?;
    Ok((run.alice, run.bob, run.report))
}

/// (A1+B1)×(A2+B2) with Alice holding (A1, A2) and Bob (B1, B2).
pub fn run_s2phm(
    cfg: &SessionConfig,
    alice: (&Matrix, &Matrix),
    bob: (&Matrix, &Matrix),
) -> Result<(Matrix, Matrix, SessionReport)> {
    let (a1, a2) = alice;
    let (b1, b2) = bob;
    if a1.shape() != b1.shape() || a2.shape() != b2.shape() || a1.cols() != a2.rows() {
        return Err(Error::shape(
            "s2phm",
            format!("({:?}, {:?}) vs ({:?}, {:?})", a1.shape(), a2.shape(), b1.shape(), b2.shape()),
        ));
    }
    let plan = Plan::s2phm(a1.rows(), a1.cols(), a2.cols());
    let run = run_pair(cfg, &plan, |s| s2phm(s, a1, a2), |s| s2phm(s, b1, b2))?;
    Ok((run.alice, run.bob, run.report))
}
