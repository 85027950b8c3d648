//! Verifiable secure matrix multiplication with CS-generated masks.
//!
//! Offline, the CS hands the left party (R_a, r_a, S_t) and the right party
//! (R_b, r_b, S_t) with S_t = R_a×R_b = r_a + r_b. Online, four messages
//! leave each party with an additive share of A×B, and both parties probe the
//! residual VF_a + VF_b − S_t with random 0/1 vectors before releasing it.

mod config;
mod plan;
mod protocol;
mod run;
mod triple;
mod verify;

pub use config::{MaskConfig, ProtocolConfig};
pub use plan::{Plan, PreprocessRequest, TripleSpec, MAX_REQUEST_TRIPLES};
pub use protocol::{s2phm, s2pm, FaultInjection, FaultTarget};
pub use run::{run_s2phm, run_s2pm};
pub use triple::{cs_preprocess, decode_bundle, encode_bundle, MaskTriple, Side};
pub use verify::{s2pm_verify, verify_tolerance, Verdict, VerifyBundle};
