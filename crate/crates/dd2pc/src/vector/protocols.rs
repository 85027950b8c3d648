use crate::error::{Error, Result, ResultExt};
use crate::numerics::{diag2v, ra2a, rb2b, Vector};
use crate::runtime::PartySession;
use crate::s2pm::s2pm;
use crate::transport::{Role, Tag};

fn data_holder(sess: &PartySession) -> Result<Role> {
    match sess.role() {
        r @ (Role::Alice | Role::Bob) => Ok(r),
        other => Err(Error::invalid(format!("{other} cannot run a vector protocol"))),
    }
}

/// Hadamard product of Alice's a and Bob's b, returned as this party's
/// additive share.
///
/// Alice lifts a into A (n×ρ²) and Bob lifts b into B (ρ²×n); the diagonal of
/// A×B is a⊙b, so each party keeps the diagonal of its S2PM share.
pub fn s2php(sess: &mut PartySession, x: &Vector) -> Result<Vector> {
    let role = data_holder(sess)?;
    let params = sess.config().split;
    params.validate()?;
    let lifted = {
        let rng = sess.rng();
        if role == Role::Alice {
            ra2a(x, &params, rng)?
        } else {
            rb2b(x, &params, rng)?
        }
    };
    let share = s2pm(sess, Role::Alice, &lifted).context_with(|| "s2php")?;
    diag2v(&share)
}

/// Turns the additive sharing a+b into a multiplicative one: returns this
/// party's factor, with v_a⊙v_b = a+b.
pub fn s2patp(sess: &mut PartySession, x: &Vector) -> Result<Vector> {
    let role = data_holder(sess)?;
    let n = x.len();
    if role == Role::Alice {
        let v_a = {
            let rng = sess.rng();
            // Log-uniform magnitude in [1e-2, 1e2] keeps 1/v_a tame.
            Vector::from_raw(
                (0..n)
                    .map(|_| rng.sign() * 10f64.powf(rng.uniform(-2.0, 2.0)))
                    .collect(),
            )
        };
        let t_a = v_a.map(|v| 1.0 / v);
        let a_hat = x.hadamard(&t_a)?;
        let u_a = s2php(sess, &t_a).context_with(|| "s2patp")?;
        let t = a_hat.add(&u_a)?;
        sess.guard(|s| s.send_matrices(Tag::AtpOffset, &[&t.to_column()]))?;
        Ok(v_a)
    } else {
        let u_b = s2php(sess, x).context_with(|| "s2patp")?;
        let t = sess.guard(|s| {
            let t = s.recv_matrix(Tag::AtpOffset)?;
            if t.shape() != (n, 1) {
                return Err(Error::shape("s2patp offset", format!("expected ({n}, 1), got {:?}", t.shape())));
            }
            t.to_vector()
        })?;
        u_b.add(&t)
    }
}

/// Elementwise 1/(a+b), returned as this party's additive share.
///
/// Bob checks his multiplicative factor before inverting it; a sum below the
/// configured floor aborts the session on both sides.
pub fn s2pr(sess: &mut PartySession, x: &Vector) -> Result<Vector> {
    let role = data_holder(sess)?;
    let u = s2patp(sess, x).context_with(|| "s2pr")?;
    let t = if role == Role::Bob {
        // |v_a| ≤ 1e2, so |a+b| ≥ ε_den implies |u_b| ≥ ε_den/1e2.
        let floor = sess.config().denominator_floor / 1e2;
        sess.guard(|_| {
            for (index, &ub) in u.iter().enumerate() {
                if !(ub.abs() >= floor) || !(1.0 / ub).is_finite() {
                    return Err(Error::DegenerateDenominator { index });
                }
            }
            Ok(u.map(|v| 1.0 / v))
        })?
    } else {
        u.map(|v| 1.0 / v)
    };
    s2php(sess, &t).context_with(|| "s2pr")
}

/// σ(a+b) = 1/(1+e^{-(a+b)}), returned as this party's additive share.
///
/// Each share is clamped to ±exp_clamp before exponentiation so e^{-a}·e^{-b}
/// stays finite.
pub fn s2ps(sess: &mut PartySession, x: &Vector) -> Result<Vector> {
    let role = data_holder(sess)?;
    let clamp = sess.config().exp_clamp;
    let t = x.map(|v| (-v.clamp(-clamp, clamp)).exp());
    let mut u = s2php(sess, &t).context_with(|| "s2ps")?;
    if role == Role::Alice {
        u = u.map(|v| v + 1.0);
    }
    s2pr(sess, &u).context_with(|| "s2ps")
}
