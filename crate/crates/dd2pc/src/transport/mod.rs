//! Framed wire protocol, links and transcripts.
//!
//! A frame is a little-endian u32 tag, a little-endian u64 payload length and
//! the payload. Matrices inside payloads use the numerics layout. One frame
//! sent one way is one round; only f64 elements count toward payload bits.

mod frame;
mod hello;
mod link;
mod transcript;

pub use frame::{digest, Frame, Tag, FRAME_HEADER_BYTES, MAX_PAYLOAD_BYTES};
pub use hello::{Hello, Role, SessionId, PROTOCOL_VERSION};
pub use link::{boxed, mem_pair, Delayed, Link, LinkModel, MemLink, TcpLink};
pub use transcript::{Direction, Transcript, TranscriptEntry};
