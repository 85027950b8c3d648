use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{digest, Frame, Role, Tag};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Sent,
    Received,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub direction: Direction,
    /// The other endpoint of the link.
    pub peer: Role,
    pub tag: Tag,
    pub payload_bytes: u64,
    /// f64 elements inside the payload (dims headers and counts excluded).
    pub elements: u64,
    pub digest: u64,
    /// Time since the owning session started. Excluded from fingerprints.
    pub at: Duration,
}

impl TranscriptEntry {
    fn fingerprint(&self) -> (Direction, Role, Tag, u64, u64, u64) {
        (self.direction, self.peer, self.tag, self.payload_bytes, self.elements, self.digest)
    }
}

/// Ordered record of every frame one endpoint sent or received.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub owner: Role,
    pub entries: Vec<TranscriptEntry>,
}

impl Transcript {
    pub fn new(owner: Role) -> Self {
        Transcript {
            owner,
            entries: Vec::new(),
        }
    }

    pub fn record(&mut self, direction: Direction, peer: Role, frame: &Frame, elements: u64, at: Duration) {
        self.entries.push(TranscriptEntry {
            direction,
            peer,
            tag: frame.tag,
            payload_bytes: frame.payload.len() as u64,
            elements,
            digest: digest(&frame.payload),
            at,
        });
    }

    /// One round per protocol message in this transcript.
    pub fn rounds(&self) -> u64 {
        self.entries.iter().filter(|e| e.tag.counts_as_round()).count() as u64
    }

    /// 64 bits per f64 element of protocol messages; headers excluded.
    pub fn payload_bits(&self) -> u64 {
        self.entries
            .iter()
            .filter(|e| e.tag.counts_as_round())
            .map(|e| e.elements * 64)
            .sum()
    }

    pub fn stats(&self) -> (u64, u64) {
        (self.rounds(), self.payload_bits())
    }

    /// Whole-protocol view reconstructed from the two data holders: every
    /// frame they sent plus every frame they received from the CS. Each
    /// message on the wire appears exactly once. Entries keep Alice's order
    /// followed by Bob's; cross-party timestamps are not comparable.
    pub fn joint(alice: &Transcript, bob: &Transcript) -> Transcript {
        let entries: Vec<TranscriptEntry> = [alice, bob]
            .iter()
            .flat_map(|t| t.entries.iter())
            .filter(|e| {
                e.direction == Direction::Sent
                    && e.peer != Role::Cs
                    && e.peer != Role::Client
                    || e.direction == Direction::Received && e.peer == Role::Cs
            })
            .cloned()
            .collect();
        Transcript {
            owner: Role::Client,
            entries,
        }
    }

    /// Timestamp-free content, equal across runs with equal seeds.
    pub fn fingerprint(&self) -> Vec<(Direction, Role, Tag, u64, u64, u64)> {
        self.entries.iter().map(TranscriptEntry::fingerprint).collect()
    }

    pub fn tags(&self) -> impl Iterator<Item = Tag> + '_ {
        self.entries.iter().map(|e| e.tag)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn handshake_frames_do_not_count() {
        let mut t = Transcript::new(Role::Alice);
        let at = Duration::ZERO;
        t.record(Direction::Sent, Role::Bob, &Frame::new(Tag::Hello, vec![0; 18]), 0, at);
        t.record(Direction::Sent, Role::Bob, &Frame::new(Tag::MaskedLeft, vec![]), 6, at);
        assert_eq!(t.stats(), (1, 384));
    }
}
