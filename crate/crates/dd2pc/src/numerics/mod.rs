//! Float matrices, seeded randomness, split lifts and rank-deficient masks.

mod layout;
mod mask;
mod matrix;
mod rng;
mod split;

pub use layout::HEADER_BYTES as MATRIX_HEADER_BYTES;
pub use mask::{gen_rank_deficient, mask_bound, Interval};
pub(crate) use mask::low_rank;
pub use matrix::{Matrix, Vector};
pub use rng::SeededRng;
pub use split::{diag2v, lift_left, lift_right, ra2a, rb2b, split_scalar, v2diag, SplitMode, SplitParams};

/// Unit roundoff used throughout the tolerance formulas, 2^-52.
pub const U: f64 = f64::EPSILON;
