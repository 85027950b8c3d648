use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

/// ChaCha20 stream with a remembered seed so children can be derived by label.
///
/// `fork` depends only on the seed and the label, never on how much of the
/// parent stream was consumed, which keeps per-party and per-trial streams
/// stable when code paths change.
#[derive(Clone, Debug)]
pub struct SeededRng {
    seed: u64,
    inner: ChaCha20Rng,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fnv1a(label: &str) -> u64 {
    label
        .bytes()
        .fold(0xCBF2_9CE4_8422_2325, |h, b| (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01B3))
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        SeededRng {
            seed,
            inner: ChaCha20Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn fork(&self, label: &str) -> SeededRng {
        SeededRng::new(splitmix64(self.seed ^ splitmix64(fnv1a(label))))
    }

    pub fn fork_index(&self, label: &str, index: u64) -> SeededRng {
        self.fork(label).fork(&index.to_string())
    }

    /// Uniform on `[lo, hi)`; returns `lo` when the interval is empty.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        if hi <= lo {
            return lo;
        }
        lo + (hi - lo) * self.inner.random::<f64>()
    }

    /// Uniform on `(0, 1]`.
    pub fn unit_open(&mut self) -> f64 {
        1.0 - self.inner.random::<f64>()
    }

    /// Uniform integer in `0..n`.
    pub fn below(&mut self, n: usize) -> usize {
        self.inner.random_range(0..n)
    }

    pub fn int_inclusive(&mut self, lo: i64, hi: i64) -> i64 {
        self.inner.random_range(lo..=hi)
    }

    pub fn bit(&mut self) -> bool {
        self.inner.random::<bool>()
    }

    pub fn sign(&mut self) -> f64 {
        if self.bit() {
            1.0
        } else {
            -1.0
        }
    }

    pub fn permutation(&mut self, n: usize) -> Vec<usize> {
        let mut p: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = self.below(i + 1);
            p.swap(i, j);
        }
        p
    }

    pub fn uniform_vec(&mut self, len: usize, lo: f64, hi: f64) -> Vec<f64> {
        (0..len).map(|_| self.uniform(lo, hi)).collect()
    }
}

impl RngCore for SeededRng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let mut a = SeededRng::new(7);
        let mut b = SeededRng::new(7);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn fork_ignores_parent_position() {
        let a = SeededRng::new(3);
        let mut b = SeededRng::new(3);
        b.next_u64();
        assert_eq!(a.fork("x").next_u64(), b.fork("x").next_u64());
        assert_ne!(a.fork("x").next_u64(), a.fork("y").next_u64());
    }

    #[test]
    fn permutation_is_complete() {
        let mut r = SeededRng::new(1);
        let mut p = r.permutation(9);
        p.sort_unstable();
        assert_eq!(p, (0..9).collect::<Vec<_>>());
    }
}
