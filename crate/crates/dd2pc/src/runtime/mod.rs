//! Sessions, the commodity server and the four-node runtime.
//!
//! A session has two data holders (Alice, Bob) and a CS. The CS only sees a
//! preprocessing request listing shapes and the mask range; it answers with
//! triple bundles and is gone before the first online message.

mod cs;
mod node;
mod pair;
mod session;

pub use cs::{CsReport, CsService};
pub use node::{collect_results, open_tcp_party, PeerEndpoint, DEFAULT_CS_ADDR_ENV};
pub use pair::{connect_parties, run_pair, run_pair_outcomes, CsHandle, PairRun, SessionPair, SessionReport};
pub use session::{PartyReport, PartySession, PhaseTimes, SessionConfig, TransportKind, DEFAULT_TIMEOUT};

use crate::error::{Error, Result};
use crate::transport::{Role, Transcript};

/// Checks that a CS transcript holds nothing but handshake, request and
/// bundle frames, and that no party exchanged anything else with the CS.
pub fn audit_cs_isolation(cs: &Transcript, parties: &[&Transcript]) -> Result<()> {
    use crate::transport::{Direction, Tag};
    for e in &cs.entries {
        let ok = match e.direction {
            Direction::Received => matches!(e.tag, Tag::Hello | Tag::PreprocessRequest),
            Direction::Sent => matches!(e.tag, Tag::Hello | Tag::TripleBundle),
        };
        if !ok {
            return Err(Error::CsViolation(format!("CS {:?} a {:?} frame", e.direction, e.tag)));
        }
    }
    for t in parties {
        for e in t.entries.iter().filter(|e| e.peer == Role::Cs) {
            let ok = match e.direction {
                Direction::Sent => matches!(e.tag, Tag::Hello | Tag::PreprocessRequest),
                Direction::Received => matches!(e.tag, Tag::Hello | Tag::TripleBundle),
            };
            if !ok || e.tag == Tag::PreprocessRequest && e.elements != 0 {
                return Err(Error::CsViolation(format!("{} {:?} a {:?} frame with the CS", t.owner, e.direction, e.tag)));
            }
        }
    }
    Ok(())
}
