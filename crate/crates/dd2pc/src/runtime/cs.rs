use std::collections::HashMap;
use std::net::{SocketAddr, TcpListener, ToSocketAddrs};
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::SeededRng;
use crate::s2pm::{cs_preprocess, encode_bundle, MaskTriple, PreprocessRequest};
use crate::transport::{Direction, Frame, Hello, Link, Role, SessionId, Tag, TcpLink, Transcript};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CsReport {
    pub session: SessionId,
    pub transcript: Transcript,
    /// Time spent generating triples.
    pub offline: Duration,
    pub triples: usize,
}

/// CS randomness for a session: independent of the parties' streams, and the
/// same whichever transport carries the session.
pub(crate) fn cs_rng(seed: u64, session: SessionId) -> SeededRng {
    SeededRng::new(seed).fork("cs").fork(&session.to_string())
}

/// One accepted link with the frames the CS exchanged on it so far.
struct CsConn {
    link: Box<dyn Link>,
    role: Role,
    session: SessionId,
    transcript: Transcript,
    started: Instant,
    request: Option<PreprocessRequest>,
}

impl CsConn {
    fn recv(&mut self, timeout: Duration) -> Result<Frame> {
        let frame = self.link.recv(timeout)?;
        let at = self.started.elapsed();
        self.transcript.record(Direction::Received, self.role, &frame, frame.numeric_elements().unwrap_or(0), at);
        // Structural guard: nothing from the online phase may reach the CS.
        if !matches!(frame.tag, Tag::Hello | Tag::PreprocessRequest) {
            let msg = format!("refusing {:?} frame from {}", frame.tag, self.role);
            let _ = self.send(Frame::new(Tag::Abort, msg.clone().into_bytes()));
            return Err(Error::CsViolation(msg));
        }
        Ok(frame)
    }

    fn send(&mut self, frame: Frame) -> Result<()> {
        debug_assert!(frame.tag.allowed_at_cs());
        let at = self.started.elapsed();
        self.transcript.record(Direction::Sent, self.role, &frame, frame.numeric_elements()?, at);
        self.link.send(frame)
    }
}

impl CsConn {
    fn read_request(&mut self, timeout: Duration) -> Result<()> {
        let frame = self.recv(timeout)?;
        if frame.tag != Tag::PreprocessRequest {
            return Err(Error::CsViolation(format!("expected a preprocessing request, got {:?}", frame.tag)));
        }
        self.request = Some(PreprocessRequest::from_frame(&frame)?);
        Ok(())
    }
}

/// Reads the hello on a fresh link and answers it; with `with_request`,
/// also reads Alice's preprocessing request.
fn accept_conn(mut link: Box<dyn Link>, started: Instant, timeout: Duration, with_request: bool) -> Result<CsConn> {
    let frame = link.recv(timeout)?;
    let hello = Hello::from_frame(&frame)?;
    let mut conn = CsConn {
        link,
        role: hello.role,
        session: hello.session,
        transcript: Transcript::new(Role::Cs),
        started,
        request: None,
    };
    conn.transcript.record(Direction::Received, hello.role, &frame, 0, started.elapsed());
    if !matches!(hello.role, Role::Alice | Role::Bob) {
        let msg = format!("CS serves alice and bob, not {}", hello.role);
        conn.send(Frame::new(Tag::Abort, msg.clone().into_bytes()))?;
        return Err(Error::Handshake(msg));
    }
    hello.check(hello.role, hello.session)?;
    conn.send(Hello::new(Role::Cs, hello.session).to_frame())?;
    if with_request && hello.role == Role::Alice {
        conn.read_request(timeout)?;
    }
    Ok(conn)
}

/// Generates the requested triples and delivers them, then forgets the session.
fn complete(mut alice: CsConn, mut bob: CsConn, seed: u64) -> Result<CsReport> {
    let session = alice.session;
    let request = alice
        .request
        .take()
        .ok_or_else(|| Error::CsViolation("alice sent no request".into()))?;
    let mut rng = cs_rng(seed, session);
    let t0 = Instant::now();
    let mut to_alice: Vec<MaskTriple> = Vec::with_capacity(request.plan.len());
    let mut to_bob: Vec<MaskTriple> = Vec::with_capacity(request.plan.len());
    for spec in request.plan.specs() {
        let (left, right) = cs_preprocess(spec.n, spec.s, spec.m, &request.mask, &mut rng)?;
        if spec.left == Role::Alice {
            to_alice.push(left);
            to_bob.push(right);
        } else {
            to_alice.push(right);
            to_bob.push(left);
        }
    }
    let offline = t0.elapsed();
    for (conn, halves) in [(&mut alice, &to_alice), (&mut bob, &to_bob)] {
        if request.batched {
            conn.send(encode_bundle(&halves.iter().collect::<Vec<_>>()))?;
        } else {
            for h in halves.iter() {
                conn.send(encode_bundle(&[h]))?;
            }
        }
    }
    let mut transcript = alice.transcript;
    transcript.entries.extend(bob.transcript.entries);
    Ok(CsReport {
        session,
        transcript,
        offline,
        triples: request.plan.len(),
    })
}

/// Serves exactly one session over two already-connected links.
pub(crate) fn serve_links(alice: Box<dyn Link>, bob: Box<dyn Link>, seed: u64, timeout: Duration) -> Result<CsReport> {
    let started = Instant::now();
    // Both hellos are answered before the request is awaited, so the parties
    // may finish their handshakes in any order.
    let mut a = accept_conn(alice, started, timeout, false)?;
    let b = accept_conn(bob, started, timeout, false)?;
    if (a.role, b.role) != (Role::Alice, Role::Bob) {
        return Err(Error::Handshake(format!("expected alice then bob, got {} and {}", a.role, b.role)));
    }
    if a.session != b.session {
        return Err(Error::Handshake("alice and bob announced different sessions".into()));
    }
    a.read_request(timeout)?;
    complete(a, b, seed)
}

#[derive(Default)]
struct Pending {
    alice: Option<CsConn>,
    bob: Option<CsConn>,
}

/// TCP commodity server. Each connection is handled on its own thread;
/// sessions pair up by id and are served as soon as both parties (and
/// Alice's request) are in.
pub struct CsService {
    listener: TcpListener,
    seed: u64,
    timeout: Duration,
}

impl CsService {
    pub fn bind(addr: impl ToSocketAddrs, seed: u64) -> Result<Self> {
        Ok(CsService {
            listener: TcpListener::bind(addr)?,
            seed,
            timeout: super::DEFAULT_TIMEOUT,
        })
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout = timeout;
        self
    }

    pub fn local_addr(&self) -> Result<SocketAddr> {
        Ok(self.listener.local_addr()?)
    }

    /// Accepts connections until `max_sessions` sessions worth of links have
    /// arrived (forever when `None`), then waits for in-flight sessions.
    pub fn serve(self, max_sessions: Option<usize>, mut on_done: impl FnMut(Result<CsReport>) + Send) -> Result<()> {
        let pending: Arc<Mutex<HashMap<SessionId, Pending>>> = Arc::default();
        let (tx, rx) = std::sync::mpsc::channel::<Result<CsReport>>();
        let max_conns = max_sessions.map(|s| 2 * s);
        let mut accepted = 0usize;
        let started = Instant::now();
        thread::scope(|scope| {
            // Reports are forwarded from the scope's workers as they finish.
            let forward = scope.spawn(move || {
                for r in rx {
                    on_done(r);
                }
            });
            for stream in self.listener.incoming() {
                let stream = match stream {
                    Ok(s) => s,
                    Err(e) => {
                        let _ = tx.send(Err(e.into()));
                        continue;
                    }
                };
                accepted += 1;
                let pending = Arc::clone(&pending);
                let tx = tx.clone();
                let (seed, timeout) = (self.seed, self.timeout);
                scope.spawn(move || {
                    let result = (|| -> Result<Option<CsReport>> {
                        let link: Box<dyn Link> = Box::new(TcpLink::new(stream)?);
                        let conn = accept_conn(link, started, timeout, true)?;
                        let id = conn.session;
                        let ready = {
                            let mut table = pending.lock().expect("pending table poisoned");
                            let slot = table.entry(id).or_default();
                            let which = if conn.role == Role::Alice { &mut slot.alice } else { &mut slot.bob };
                            if which.is_some() {
                                return Err(Error::Handshake(format!("duplicate {} for session {id}", conn.role)));
                            }
                            *which = Some(conn);
                            if slot.alice.is_some() && slot.bob.is_some() {
                                table.remove(&id)
                            } else {
                                None
                            }
                        };
                        match ready {
                            Some(Pending { alice: Some(a), bob: Some(b) }) => complete(a, b, seed).map(Some),
                            _ => Ok(None),
                        }
                    })();
                    match result {
                        Ok(Some(report)) => {
                            let _ = tx.send(Ok(report));
                        }
                        Ok(None) => {}
                        Err(e) => {
                            let _ = tx.send(Err(e));
                        }
                    }
                });
                if max_conns.is_some_and(|m| accepted >= m) {
                    break;
                }
            }
            drop(tx);
            let _ = forward.join();
        });
        Ok(())
    }
}
