use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::MATRIX_HEADER_BYTES;

/// Frame header: u32 tag, u64 payload length, both little-endian.
pub const FRAME_HEADER_BYTES: usize = 12;

/// Upper bound on a single payload, guarding allocations on hostile input.
pub const MAX_PAYLOAD_BYTES: u64 = 1 << 34;

/// Message registry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[repr(u32)]
pub enum Tag {
    Hello = 0x00,
    /// Â = A + R_a, left party to right party.
    MaskedLeft = 0x01,
    /// B̂ = B + R_b, right party to left party.
    MaskedRight = 0x02,
    /// VF_b followed by T.
    Correction = 0x03,
    /// VF_a.
    LeftCheck = 0x04,
    /// The vector t of the addition-to-product conversion.
    AtpOffset = 0x05,
    TripleBundle = 0x10,
    PreprocessRequest = 0x11,
    /// A party's output share pushed to the client node.
    ResultShare = 0x20,
    Abort = 0x7F,
}

impl Tag {
    pub fn from_u32(code: u32) -> Result<Tag> {
        Ok(match code {
            0x00 => Tag::Hello,
            0x01 => Tag::MaskedLeft,
            0x02 => Tag::MaskedRight,
            0x03 => Tag::Correction,
            0x04 => Tag::LeftCheck,
            0x05 => Tag::AtpOffset,
            0x10 => Tag::TripleBundle,
            0x11 => Tag::PreprocessRequest,
            0x20 => Tag::ResultShare,
            0x7F => Tag::Abort,
            other => return Err(Error::UnknownTag(other)),
        })
    }

    pub fn code(self) -> u32 {
        self as u32
    }

    /// Messages that carry protocol traffic and count as one round each.
    pub fn counts_as_round(self) -> bool {
        matches!(
            self,
            Tag::MaskedLeft | Tag::MaskedRight | Tag::Correction | Tag::LeftCheck | Tag::AtpOffset | Tag::TripleBundle
        )
    }

    /// Frames a commodity server may ever send or receive.
    pub fn allowed_at_cs(self) -> bool {
        matches!(self, Tag::Hello | Tag::PreprocessRequest | Tag::TripleBundle | Tag::Abort)
    }

    /// Number of matrices in the payload, before any bundle count prefix.
    fn matrix_layout(self) -> MatrixLayout {
        match self {
            Tag::MaskedLeft | Tag::MaskedRight | Tag::LeftCheck | Tag::AtpOffset | Tag::ResultShare => {
                MatrixLayout::Fixed(1)
            }
            Tag::Correction => MatrixLayout::Fixed(2),
            Tag::TripleBundle => MatrixLayout::Bundle,
            Tag::Hello | Tag::PreprocessRequest | Tag::Abort => MatrixLayout::Fixed(0),
        }
    }
}

enum MatrixLayout {
    Fixed(usize),
    /// u32 count, then per entry one side byte and three matrices.
    Bundle,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    pub tag: Tag,
    pub payload: Vec<u8>,
}

impl Frame {
    pub fn new(tag: Tag, payload: Vec<u8>) -> Self {
        Frame { tag, payload }
    }

    pub fn encoded_len(&self) -> usize {
        FRAME_HEADER_BYTES + self.payload.len()
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.encoded_len());
        out.extend_from_slice(&self.tag.code().to_le_bytes());
        out.extend_from_slice(&(self.payload.len() as u64).to_le_bytes());
        out.extend_from_slice(&self.payload);
        out
    }

    /// Decodes exactly one frame occupying all of `bytes`.
    pub fn decode(bytes: &[u8]) -> Result<Frame> {
        if bytes.len() < FRAME_HEADER_BYTES {
            return Err(Error::Truncated {
                needed: FRAME_HEADER_BYTES,
                got: bytes.len(),
            });
        }
        let (tag, len) = parse_header(bytes[..FRAME_HEADER_BYTES].try_into().unwrap())?;
        let needed = FRAME_HEADER_BYTES + len;
        if bytes.len() < needed {
            return Err(Error::Truncated {
                needed,
                got: bytes.len(),
            });
        }
        if bytes.len() > needed {
            return Err(Error::Malformed(format!("{} bytes after frame end", bytes.len() - needed)));
        }
        Ok(Frame::new(tag, bytes[FRAME_HEADER_BYTES..].to_vec()))
    }

    pub fn read_from(r: &mut impl Read) -> Result<Frame> {
        let mut header = [0u8; FRAME_HEADER_BYTES];
        r.read_exact(&mut header)?;
        let (tag, len) = parse_header(header)?;
        let mut payload = vec![0u8; len];
        r.read_exact(&mut payload)?;
        Ok(Frame::new(tag, payload))
    }

    pub fn write_to(&self, w: &mut impl Write) -> Result<()> {
        w.write_all(&self.tag.code().to_le_bytes())?;
        w.write_all(&(self.payload.len() as u64).to_le_bytes())?;
        w.write_all(&self.payload)?;
        w.flush()?;
        Ok(())
    }

    /// Count of f64 elements carried by the payload, read from the matrix
    /// dims headers without decoding the data.
    pub fn numeric_elements(&self) -> Result<u64> {
        let p = &self.payload;
        let mut at = 0usize;
        let mut total = 0u64;
        let mut skip_matrix = |at: &mut usize| -> Result<()> {
            if p.len() < *at + MATRIX_HEADER_BYTES {
                return Err(Error::Truncated {
                    needed: *at + MATRIX_HEADER_BYTES,
                    got: p.len(),
                });
            }
            let rows = u32::from_le_bytes(p[*at..*at + 4].try_into().unwrap()) as u64;
            let cols = u32::from_le_bytes(p[*at + 4..*at + 8].try_into().unwrap()) as u64;
            total += rows * cols;
            *at += MATRIX_HEADER_BYTES + 8 * (rows * cols) as usize;
            Ok(())
        };
        match self.tag.matrix_layout() {
            MatrixLayout::Fixed(k) => {
                for _ in 0..k {
                    skip_matrix(&mut at)?;
                }
            }
            MatrixLayout::Bundle => {
                if p.len() < 4 {
                    return Err(Error::Truncated { needed: 4, got: p.len() });
                }
                let count = u32::from_le_bytes(p[..4].try_into().unwrap());
                at = 4;
                for _ in 0..count {
                    at += 1;
                    for _ in 0..3 {
                        skip_matrix(&mut at)?;
                    }
                }
            }
        }
        Ok(total)
    }
}

fn parse_header(h: [u8; FRAME_HEADER_BYTES]) -> Result<(Tag, usize)> {
    let tag = Tag::from_u32(u32::from_le_bytes(h[..4].try_into().unwrap()))?;
    let len = u64::from_le_bytes(h[4..].try_into().unwrap());
    if len > MAX_PAYLOAD_BYTES {
        return Err(Error::Malformed(format!("payload length {len} exceeds limit")));
    }
    Ok((tag, len as usize))
}

/// FNV-1a over the payload; used to compare transcripts without storing bytes.
pub fn digest(bytes: &[u8]) -> u64 {
    // FNV-1a over little-endian 64-bit words, four independent lanes so the
    // multiplies pipeline; the tail is folded in bytewise.
    const P: u64 = 0x0000_0100_0000_01B3;
    let mut lanes = [0xCBF2_9CE4_8422_2325u64, 0x8422_2325_CBF2_9CE4, 0x9E37_79B9_7F4A_7C15, 0xC2B2_AE3D_27D4_EB4F];
    let mut blocks = bytes.chunks_exact(32);
    for block in &mut blocks {
        for (lane, w) in lanes.iter_mut().zip(block.chunks_exact(8)) {
            *lane = (*lane ^ u64::from_le_bytes(w.try_into().unwrap())).wrapping_mul(P);
        }
    }
    let mut h = lanes.iter().fold(bytes.len() as u64, |h, &l| (h ^ l).wrapping_mul(P));
    for b in blocks.remainder() {
        h = (h ^ u64::from(*b)).wrapping_mul(P);
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Matrix;

    #[test]
    fn empty_payload_is_header_only() {
        let f = Frame::new(Tag::MaskedLeft, vec![]);
        let bytes = f.encode();
        assert_eq!(bytes.len(), 12);
        assert_eq!(Frame::decode(&bytes).unwrap(), f);
    }

    #[test]
    fn rejects_truncated_and_unknown() {
        assert!(matches!(Frame::decode(&[0u8; 5]), Err(Error::Truncated { .. })));
        let mut bytes = Frame::new(Tag::Abort, b"x".to_vec()).encode();
        bytes[0] = 0x42;
        assert!(matches!(Frame::decode(&bytes), Err(Error::UnknownTag(0x42))));
    }

    #[test]
    fn counts_elements_of_correction() {
        let mut p = Matrix::zeros(2, 3).to_bytes();
        Matrix::zeros(2, 3).write_to(&mut p);
        assert_eq!(Frame::new(Tag::Correction, p).numeric_elements().unwrap(), 12);
    }
}
