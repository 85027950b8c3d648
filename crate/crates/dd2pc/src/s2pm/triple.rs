use serde::{Deserialize, Serialize};

use super::MaskConfig;
use crate::error::{Error, Result};
use crate::numerics::{low_rank, Matrix, SeededRng};
use crate::transport::{Frame, Tag};

/// Which operand of A×B a party holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    /// Holds A (n×s), receives R_a.
    Left,
    /// Holds B (s×m), receives R_b.
    Right,
}

/// One party's share of the CS correlated randomness for a single S2PM call.
#[derive(Clone, Debug, PartialEq)]
pub struct MaskTriple {
    pub side: Side,
    /// R_a (n×s) or R_b (s×m).
    pub r_mask: Matrix,
    /// r_a or r_b, with r_a + r_b = S_t.
    pub r_share: Matrix,
    /// S_t = R_a×R_b, identical in both halves.
    pub st: Matrix,
}

/// Generates the two halves for an n×s by s×m product.
///
/// R_a has rank ≤ min(n, s−1) and R_b rank ≤ min(m, s−1), so both are rank
/// deficient with respect to the shared dimension s even when n or m is 1.
pub fn cs_preprocess(
    n: usize,
    s: usize,
    m: usize,
    mask: &MaskConfig,
    rng: &mut SeededRng,
) -> Result<(MaskTriple, MaskTriple)> {
    if s < 2 {
        return Err(Error::invalid(format!("shared dimension s must be >= 2, got {s}")));
    }
    if n == 0 || m == 0 {
        return Err(Error::invalid("outer dimensions must be non-zero"));
    }
    let bound = mask.bound()?;
    let ra = low_rank(n, s, n.min(s - 1), bound, rng);
    let rb = low_rank(s, m, m.min(s - 1), bound, rng);
    let st = ra.matmul(&rb)?;
    let spread = st.max_abs().max(bound);
    let r_a = Matrix::from_raw(n, m, rng.uniform_vec(n * m, -spread, spread));
    let r_b = st.sub(&r_a)?;
    Ok((
        MaskTriple {
            side: Side::Left,
            r_mask: ra,
            r_share: r_a,
            st: st.clone(),
        },
        MaskTriple {
            side: Side::Right,
            r_mask: rb,
            r_share: r_b,
            st,
        },
    ))
}

pub fn encode_bundle(triples: &[&MaskTriple]) -> Frame {
    let mut p = Vec::new();
    p.extend_from_slice(&(triples.len() as u32).to_le_bytes());
    for t in triples {
        p.push(match t.side {
            Side::Left => 0,
            Side::Right => 1,
        });
        t.r_mask.write_to(&mut p);
        t.r_share.write_to(&mut p);
        t.st.write_to(&mut p);
    }
    Frame::new(Tag::TripleBundle, p)
}

pub fn decode_bundle(frame: &Frame) -> Result<Vec<MaskTriple>> {
    if frame.tag != Tag::TripleBundle {
        return Err(Error::UnexpectedFrame {
            expected: "TripleBundle".into(),
            got: format!("{:?}", frame.tag),
        });
    }
    let p = &frame.payload;
    if p.len() < 4 {
        return Err(Error::Truncated { needed: 4, got: p.len() });
    }
    let count = u32::from_le_bytes(p[..4].try_into().unwrap()) as usize;
    let mut at = 4;
    let mut out = Vec::with_capacity(count.min(1 << 16));
    for _ in 0..count {
        let side = match p.get(at) {
            Some(0) => Side::Left,
            Some(1) => Side::Right,
            Some(b) => return Err(Error::Malformed(format!("bad side byte {b}"))),
            None => return Err(Error::Truncated { needed: at + 1, got: p.len() }),
        };
        at += 1;
        let mut next = || -> Result<Matrix> {
            let (m, used) = Matrix::read_from(&p[at..])?;
            at += used;
            Ok(m)
        };
        let r_mask = next()?;
        let r_share = next()?;
        let st = next()?;
        if r_share.shape() != st.shape() {
            return Err(Error::Malformed("share and S_t shapes differ".into()));
        }
        out.push(MaskTriple {
            side,
            r_mask,
            r_share,
            st,
        });
    }
    if at != p.len() {
        return Err(Error::Malformed(format!("{} trailing bytes in bundle", p.len() - at)));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shares_sum_to_st() {
        let mut rng = SeededRng::new(4);
        let (a, b) = cs_preprocess(2, 2, 2, &MaskConfig::default(), &mut rng).unwrap();
        assert_eq!(a.st, b.st);
        for ((x, y), s) in a.r_share.as_slice().iter().zip(b.r_share.as_slice()).zip(a.st.as_slice()) {
            assert!((x + y - s).abs() <= 4.0 * f64::EPSILON * x.abs().max(s.abs()));
        }
    }

    #[test]
    fn rejects_unit_shared_dimension() {
        let mut rng = SeededRng::new(0);
        assert!(cs_preprocess(3, 1, 3, &MaskConfig::default(), &mut rng).is_err());
    }

    #[test]
    fn bundle_roundtrip() {
        let mut rng = SeededRng::new(8);
        let (a, b) = cs_preprocess(3, 4, 2, &MaskConfig::default(), &mut rng).unwrap();
        let f = encode_bundle(&[&a, &b]);
        assert_eq!(f.numeric_elements().unwrap(), (12 + 6 + 6 + 8 + 6 + 6) as u64);
        assert_eq!(decode_bundle(&f).unwrap(), vec![a, b]);
    }
}
