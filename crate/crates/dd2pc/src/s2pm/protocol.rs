use serde::{Deserialize, Serialize};

use super::{s2pm_verify, Side, VerifyBundle};
use crate::error::{Error, Result, ResultExt};
use crate::numerics::Matrix;
use crate::runtime::PartySession;
use crate::transport::{Role, Tag};

/// Where an injected anomaly lands inside the right party's step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FaultTarget {
    /// VF_b is perturbed after T has been derived from it, in the copy sent
    /// and in the copy the right party verifies with.
    CorrectionVf,
    /// T is perturbed in transit, which corrupts V_a.
    CorrectionT,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FaultInjection {
    pub target: FaultTarget,
    pub row: usize,
    pub col: usize,
    pub magnitude: f64,
}

fn expect_shape(what: &'static str, m: &Matrix, shape: (usize, usize)) -> Result<()> {
    if m.shape() != shape {
        return Err(Error::shape(what, format!("expected {shape:?}, got {:?}", m.shape())));
    }
    Ok(())
}

/// One party's side of a verified secure matrix product.
///
/// The party holding the left operand passes A (n×s); the other passes
/// B (s×m). `left` names which data holder holds A. The returned matrix is
/// this party's additive share of A×B, released only after this party's
/// verification accepts.
pub fn s2pm(sess: &mut PartySession, left: Role, operand: &Matrix) -> Result<Matrix> {
    if !matches!(left, Role::Alice | Role::Bob) {
        return Err(Error::invalid("left operand holder must be alice or bob"));
    }
    sess.guard(|sess| {
        if sess.role() == left {
            left_side(sess, operand)
        } else {
            right_side(sess, operand)
        }
    })
}

fn left_side(sess: &mut PartySession, a: &Matrix) -> Result<Matrix> {
    let triple = sess.take_triple(Side::Left)?;
    expect_shape("s2pm operand A vs R_a", a, triple.r_mask.shape())?;
    let (n, s) = a.shape();
    let m = triple.st.cols();

    let a_hat = a.add(&triple.r_mask)?;
    sess.send_matrices(Tag::MaskedLeft, &[&a_hat])?;
    let b_hat = sess.recv_matrix(Tag::MaskedRight)?;
    expect_shape("s2pm received B̂", &b_hat, (s, m))?;
    let mut corr = sess.recv_matrices(Tag::Correction, 2)?;
    let t = corr.pop().expect("two matrices");
    let vf_b = corr.pop().expect("two matrices");
    expect_shape("s2pm received VF_b", &vf_b, (n, m))?;
    expect_shape("s2pm received T", &t, (n, m))?;

    let ra_bhat = triple.r_mask.matmul(&b_hat)?;
    let v_a = t.add(&triple.r_share)?.sub(&ra_bhat)?;
    let vf_a = v_a.add(&ra_bhat)?;
    sess.send_matrices(Tag::LeftCheck, &[&vf_a])?;
    verify(sess, vf_a, vf_b, triple.st, s)?;
    v_a.ensure_finite("s2pm share")
}

fn right_side(sess: &mut PartySession, b: &Matrix) -> Result<Matrix> {
    let triple = sess.take_triple(Side::Right)?;
    expect_shape("s2pm operand B vs R_b", b, triple.r_mask.shape())?;
    let (s, m) = b.shape();
    let n = triple.st.rows();

    let a_hat = sess.recv_matrix(Tag::MaskedLeft)?;
    expect_shape("s2pm received Â", &a_hat, (n, s))?;
    let b_hat = b.add(&triple.r_mask)?;
    sess.send_matrices(Tag::MaskedRight, &[&b_hat])?;

    let bound = sess.config().mask.bound()?;
    let v_b = {
        let rng = sess.rng();
        Matrix::from_raw(n, m, rng.uniform_vec(n * m, -bound, bound))
    };
    let mut vf_b = v_b.sub(&a_hat.matmul(b)?)?;
    let mut t = triple.r_share.sub(&vf_b)?;
    if let Some(f) = sess.take_fault() {
        if f.row >= n || f.col >= m {
            return Err(Error::invalid(format!("fault entry ({}, {}) outside {n}x{m}", f.row, f.col)));
        }
        let target = match f.target {
            FaultTarget::CorrectionVf => &mut vf_b,
            FaultTarget::CorrectionT => &mut t,
        };
        target.set(f.row, f.col, target.get(f.row, f.col) + f.magnitude);
    }
    sess.send_matrices(Tag::Correction, &[&vf_b, &t])?;
    let vf_a = sess.recv_matrix(Tag::LeftCheck)?;
    expect_shape("s2pm received VF_a", &vf_a, (n, m))?;
    verify(sess, vf_a, vf_b, triple.st, s)?;
    v_b.ensure_finite("s2pm share")
}

fn verify(sess: &mut PartySession, vf_a: Matrix, vf_b: Matrix, st: Matrix, s: usize) -> Result<()> {
    let rounds = sess.config().verify_rounds;
    if rounds == 0 {
        return Ok(());
    }
    let slack = sess.config().verify_slack;
    let bundle = VerifyBundle::new(vf_a, vf_b, st, rounds, s)?;
    sess.time_verification(|rng| s2pm_verify(&bundle, slack, rng)).into_result()
}

/// One party's side of (A1+B1)×(A2+B2).
///
/// Alice passes (A1, A2) and Bob (B1, B2). The result is the local product
/// plus the shares of A1×B2 (Alice left) and B1×A2 (Bob left).
pub fn s2phm(sess: &mut PartySession, first: &Matrix, second: &Matrix) -> Result<Matrix> {
    if first.cols() < 2 {
        return Err(Error::invalid("hybrid product needs shared dimension >= 2"));
    }
    let local = first.matmul(second)?;
    let (for_alice_left, for_bob_left) = match sess.role() {
        Role::Alice => (first, second),
        _ => (second, first),
    };
    let v1 = s2pm(sess, Role::Alice, for_alice_left).context_with(|| "s2phm sub-product A1×B2")?;
    let v2 = s2pm(sess, Role::Bob, for_bob_left).context_with(|| "s2phm sub-product B1×A2")?;
    local.add(&v1)?.add(&v2)
}
