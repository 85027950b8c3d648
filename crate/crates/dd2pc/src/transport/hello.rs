use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Frame, Tag};
use crate::error::{Error, Result};

pub const PROTOCOL_VERSION: u8 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Role {
    Client,
    Alice,
    Bob,
    Cs,
}

impl Role {
    fn code(self) -> u8 {
        match self {
            Role::Client => 0,
            Role::Alice => 1,
            Role::Bob => 2,
            Role::Cs => 3,
        }
    }

    fn from_code(c: u8) -> Result<Role> {
        Ok(match c {
            0 => Role::Client,
            1 => Role::Alice,
            2 => Role::Bob,
            3 => Role::Cs,
            other => return Err(Error::Handshake(format!("unknown role code {other}"))),
        })
    }

    /// The other data holder.
    pub fn other(self) -> Role {
        match self {
            Role::Alice => Role::Bob,
            Role::Bob => Role::Alice,
            r => r,
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::Client => "client",
            Role::Alice => "alice",
            Role::Bob => "bob",
            Role::Cs => "cs",
        })
    }
}

impl FromStr for Role {
    type Err = Error;
    fn from_str(s: &str) -> Result<Role> {
        match s.to_ascii_lowercase().as_str() {
            "client" => Ok(Role::Client),
            "alice" => Ok(Role::Alice),
            "bob" => Ok(Role::Bob),
            "cs" => Ok(Role::Cs),
            other => Err(Error::invalid(format!("unknown role '{other}'"))),
        }
    }
}

/// 128-bit session identifier, printed as 32 hex digits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SessionId(pub u128);

impl SessionId {
    /// Deterministic id for seeded in-process runs.
    pub fn derive(seed: u64) -> Self {
        let lo = crate::transport::frame::digest(&seed.to_le_bytes());
        let hi = crate::transport::frame::digest(&lo.to_le_bytes());
        SessionId((u128::from(hi) << 64) | u128::from(lo))
    }
}

impl fmt::Display for SessionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:032x}", self.0)
    }
}

impl FromStr for SessionId {
    type Err = Error;
    fn from_str(s: &str) -> Result<SessionId> {
        u128::from_str_radix(s.trim_start_matches("0x"), 16)
            .map(SessionId)
            .map_err(|e| Error::invalid(format!("session id '{s}': {e}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Hello {
    pub version: u8,
    pub role: Role,
    pub session: SessionId,
}

impl Hello {
    pub fn new(role: Role, session: SessionId) -> Self {
        Hello {
            version: PROTOCOL_VERSION,
            role,
            session,
        }
    }

    pub fn to_frame(&self) -> Frame {
        let mut p = Vec::with_capacity(18);
        p.push(self.version);
        p.push(self.role.code());
        p.extend_from_slice(&self.session.0.to_le_bytes());
        Frame::new(Tag::Hello, p)
    }

    pub fn from_frame(frame: &Frame) -> Result<Hello> {
        if frame.tag != Tag::Hello {
            return Err(Error::Handshake(format!("expected hello, got {:?}", frame.tag)));
        }
        let p = &frame.payload;
        if p.len() != 18 {
            return Err(Error::Handshake(format!("hello payload of {} bytes", p.len())));
        }
        Ok(Hello {
            version: p[0],
            role: Role::from_code(p[1])?,
            session: SessionId(u128::from_le_bytes(p[2..18].try_into().unwrap())),
        })
    }

    /// Checks a received hello against what this endpoint expects.
    pub fn check(&self, expected_role: Role, session: SessionId) -> Result<()> {
        if self.version != PROTOCOL_VERSION {
            return Err(Error::Handshake(format!(
                "protocol version {} (expected {PROTOCOL_VERSION})",
                self.version
            )));
        }
        if self.role != expected_role {
            return Err(Error::Handshake(format!("peer claims role {} but {expected_role} expected", self.role)));
        }
        if self.session != session {
            return Err(Error::Handshake(format!("session {} does not match {session}", self.session)));
        }
        Ok(())
    }
}
