//! Wire layout: two little-endian u32 dims, then row-major little-endian f64.

use super::Matrix;
use crate::error::{Error, Result};

pub const HEADER_BYTES: usize = 8;

impl Matrix {
    pub fn encoded_len(&self) -> usize {
        HEADER_BYTES + 8 * self.len()
    }

    pub fn write_to(&self, out: &mut Vec<u8>) {
        out.reserve(self.encoded_len());
        out.extend_from_slice(&(self.rows() as u32).to_le_bytes());
        out.extend_from_slice(&(self.cols() as u32).to_le_bytes());
        for x in self.as_slice() {
            out.extend_from_slice(&x.to_le_bytes());
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.write_to(&mut out);
        out
    }

    /// Decodes one matrix from the front of `bytes`, returning it and the
    /// number of bytes consumed. Non-finite elements are rejected.
    pub fn read_from(bytes: &[u8]) -> Result<(Matrix, usize)> {
        if bytes.len() < HEADER_BYTES {
            return Err(Error::Truncated {
                needed: HEADER_BYTES,
                got: bytes.len(),
            });
        }
        let rows = u32::from_le_bytes(bytes[0..4].try_into().unwrap()) as usize;
        let cols = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
        let count = rows
            .checked_mul(cols)
            .ok_or_else(|| Error::Malformed(format!("matrix dims {rows}x{cols} overflow")))?;
        let needed = HEADER_BYTES + 8 * count;
        if bytes.len() < needed {
            return Err(Error::Truncated {
                needed,
                got: bytes.len(),
            });
        }
        let data = bytes[HEADER_BYTES..needed]
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Ok((Matrix::new(rows, cols, data)?, needed))
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Matrix> {
        let (m, used) = Matrix::read_from(bytes)?;
        if used != bytes.len() {
            return Err(Error::Malformed(format!("{} trailing bytes after matrix", bytes.len() - used)));
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_is_bit_exact() {
        let m = Matrix::from_fn(3, 4, |i, j| (i as f64 + 0.1) * (j as f64 - 1.7) / 3.0);
        let bytes = m.to_bytes();
        assert_eq!(bytes.len(), 8 + 12 * 8);
        let back = Matrix::from_bytes(&bytes).unwrap();
        assert_eq!(back.to_bytes(), bytes);
    }

    #[test]
    fn short_input_is_truncation() {
        let bytes = Matrix::zeros(2, 2).to_bytes();
        assert!(matches!(Matrix::from_bytes(&bytes[..20]), Err(Error::Truncated { .. })));
        assert!(matches!(Matrix::from_bytes(&bytes[..5]), Err(Error::Truncated { .. })));
    }
}
