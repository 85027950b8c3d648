//! Helpers for running each party as its own process over TCP.

use std::net::{SocketAddr, TcpListener, TcpStream};
use std::thread;
use std::time::{Duration, Instant};

use super::session::{PartySession, SessionConfig};
use crate::error::{Error, Result};
use crate::numerics::Matrix;
use crate::transport::{boxed, Hello, Link, Role, SessionId, Tag, TcpLink};

/// Environment variable consulted for the CS address when none is given.
pub const DEFAULT_CS_ADDR_ENV: &str = "DD2PC_CS_ADDR";

/// How a data holder reaches the other one.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PeerEndpoint {
    Listen(SocketAddr),
    Connect(SocketAddr),
}

fn connect_retry(addr: SocketAddr, timeout: Duration) -> Result<TcpStream> {
    let deadline = Instant::now() + timeout;
    loop {
        match TcpStream::connect(addr) {
            Ok(s) => return Ok(s),
            Err(e) if Instant::now() >= deadline => {
                return Err(Error::Timeout(format!("could not reach {addr}: {e}")));
            }
            Err(_) => thread::sleep(Duration::from_millis(50)),
        }
    }
}

/// Connects a data holder to its peer and the CS. The session is not opened
/// yet; call [`PartySession::open`] with the plan next.
pub fn open_tcp_party(role: Role, cfg: &SessionConfig, peer: PeerEndpoint, cs: SocketAddr) -> Result<PartySession> {
    let peer_stream = match peer {
        PeerEndpoint::Listen(addr) => {
            let listener = TcpListener::bind(addr)?;
            listener.accept()?.0
        }
        PeerEndpoint::Connect(addr) => connect_retry(addr, cfg.timeout)?,
    };
    let cs_stream = connect_retry(cs, cfg.timeout)?;
    PartySession::new(
        role,
        cfg,
        boxed(TcpLink::new(peer_stream)?, cfg.link),
        boxed(TcpLink::new(cs_stream)?, cfg.link),
    )
}

/// Client side: accepts one connection from each data holder and returns
/// (Alice's share, Bob's share).
pub fn collect_results(listener: &TcpListener, session: SessionId, timeout: Duration) -> Result<(Matrix, Matrix)> {
    let mut alice = None;
    let mut bob = None;
    while alice.is_none() || bob.is_none() {
        let (stream, _) = listener.accept()?;
        let mut link = TcpLink::new(stream)?;
        let hello = Hello::from_frame(&link.recv(timeout)?)?;
        if !matches!(hello.role, Role::Alice | Role::Bob) {
            return Err(Error::Handshake(format!("client expects data holders, got {}", hello.role)));
        }
        hello.check(hello.role, session)?;
        let frame = link.recv(timeout)?;
        if frame.tag != Tag::ResultShare {
            return Err(Error::UnexpectedFrame {
                expected: format!("{:?}", Tag::ResultShare),
                got: format!("{:?}", frame.tag),
            });
        }
        let share = Matrix::from_bytes(&frame.payload)?;
        let slot = if hello.role == Role::Alice { &mut alice } else { &mut bob };
        if slot.replace(share).is_some() {
            return Err(Error::Handshake(format!("{} sent its result twice", hello.role)));
        }
    }
    Ok((alice.unwrap(), bob.unwrap()))
}
