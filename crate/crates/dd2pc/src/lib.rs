//! Two-party floating-point computation by data disguising.
//!
//! Two data holders, Alice and Bob, compute on additive shares of real
//! vectors and matrices with help from a commodity server (CS) that only
//! generates correlated masks offline. Nothing is encoded into a ring: values
//! stay `f64` end to end, masked by rank-deficient random matrices, and every
//! multiplication can be checked by the parties themselves.
//!
//! - [`numerics`]: matrices, seeded RNG, sign-consistent splits, masks.
//! - [`s2pm`]: masked matrix multiplication with CS triples and l-round checks.
//! - [`vector`]: Hadamard product, addition-to-product, reciprocal, sigmoid.
//! - [`logreg`]: secure logistic regression and its plaintext twin.
//! - [`transport`] and [`runtime`]: framed messages, in-process and TCP links,
//!   transcripts, the CS service and four-node sessions.
//! - [`harness`]: experiment drivers and JSON/CSV reports.
//!
//! ```
//! use dd2pc::numerics::Vector;
//! use dd2pc::runtime::SessionConfig;
//! use dd2pc::vector::run_s2php;
//!
//! let a = Vector::new(vec![1.5, -2.0, 4.0]).unwrap();
//! let b = Vector::new(vec![2.0, 0.5, 0.25]).unwrap();
//! let (shares, report) = run_s2php(&SessionConfig::new(7), &a, &b).unwrap();
//! let product = shares.reconstruct().unwrap();
//! assert!((product.get(0) - 3.0).abs() < 1e-12);
//! assert_eq!(report.rounds(), 6);
//! ```

#![deny(unsafe_code)]
// `!(x >= y)` is used on purpose so NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod harness;
pub mod logreg;
pub mod numerics;
pub mod runtime;
pub mod s2pm;
pub mod transport;
pub mod vector;

pub use error::{Error, Result};
