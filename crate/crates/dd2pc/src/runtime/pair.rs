use std::net::{TcpListener, TcpStream};
use std::thread::{self, JoinHandle};

use serde::{Deserialize, Serialize};

use super::cs::{serve_links, CsReport, CsService};
use super::session::{PartyReport, PartySession, PhaseTimes, SessionConfig, TransportKind};
use crate::error::{Error, Result};
use crate::s2pm::Plan;
use crate::transport::{boxed, mem_pair, Link, Role, TcpLink, Transcript};

/// The CS side of a session started by [`connect_parties`].
pub struct CsHandle {
    join: JoinHandle<Result<CsReport>>,
}

impl CsHandle {
    pub fn join(self) -> Result<CsReport> {
        self.join
            .join()
            .unwrap_or_else(|_| Err(Error::Preprocessing("CS thread panicked".into())))
    }
}

/// Both data holders, opened and holding their triples, plus the CS.
pub struct SessionPair {
    pub alice: PartySession,
    pub bob: PartySession,
    pub cs: CsHandle,
}

/// Stands up Alice, Bob and a CS on the configured transport, runs the
/// handshakes and delivers all triples for `plan`. The CS is finished once
/// this returns.
pub fn connect_parties(cfg: &SessionConfig, plan: &Plan) -> Result<SessionPair> {
    let model = cfg.link;
    let (seed, timeout) = (cfg.seed, cfg.timeout);
    type Links = (Box<dyn Link>, Box<dyn Link>, Box<dyn Link>, Box<dyn Link>, CsHandle);
    let (a_peer, b_peer, a_cs, b_cs, cs): Links =
        match cfg.transport {
            TransportKind::Mem => {
                let (a_peer, b_peer) = mem_pair();
                let (a_cs, cs_a) = mem_pair();
                let (b_cs, cs_b) = mem_pair();
                let join = thread::spawn(move || serve_links(boxed(cs_a, model), boxed(cs_b, model), seed, timeout));
                (boxed(a_peer, model), boxed(b_peer, model), boxed(a_cs, model), boxed(b_cs, model), CsHandle { join })
            }
            TransportKind::Tcp => {
                let service = CsService::bind("127.0.0.1:0", seed)?.with_timeout(timeout);
                let cs_addr = service.local_addr()?;
                let join = thread::spawn(move || {
                    let mut out = None;
                    service.serve(Some(1), |r| out = Some(r))?;
                    out.unwrap_or_else(|| Err(Error::Preprocessing("CS finished without a session".into())))
                });
                let listener = TcpListener::bind("127.0.0.1:0")?;
                let b_stream = TcpStream::connect(listener.local_addr()?)?;
                let (a_stream, _) = listener.accept()?;
                let a_cs = TcpStream::connect(cs_addr)?;
                let b_cs = TcpStream::connect(cs_addr)?;
                (
                    boxed(TcpLink::new(a_stream)?, model),
                    boxed(TcpLink::new(b_stream)?, model),
                    boxed(TcpLink::new(a_cs)?, model),
                    boxed(TcpLink::new(b_cs)?, model),
                    CsHandle { join },
                )
            }
        };
    let mut alice = PartySession::new(Role::Alice, cfg, a_peer, a_cs)?;
    let mut bob = PartySession::new(Role::Bob, cfg, b_peer, b_cs)?;
    let opened = (|| {
        alice.send_hellos()?;
        bob.send_hellos()?;
        alice.expect_hellos()?;
        bob.expect_hellos()?;
        alice.request_preprocessing(plan)?;
        alice.drain_preprocessing(plan.len())?;
        bob.drain_preprocessing(plan.len())
    })();
    if let Err(e) = opened {
        drop((alice, bob));
        return Err(match cs.join() {
            Err(cs_err) => cs_err.context(format!("session setup failed ({e})")),
            Ok(_) => e,
        });
    }
    Ok(SessionPair { alice, bob, cs })
}

/// Transcripts and timings of one finished session.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SessionReport {
    pub alice: PartyReport,
    pub bob: PartyReport,
    pub cs: CsReport,
}

impl SessionReport {
    pub fn joint(&self) -> Transcript {
        Transcript::joint(&self.alice.transcript, &self.bob.transcript)
    }

    pub fn rounds(&self) -> u64 {
        self.joint().rounds()
    }

    pub fn payload_bits(&self) -> u64 {
        self.joint().payload_bits()
    }

    /// Sum over both parties, with the CS generation time added to offline.
    pub fn phases(&self) -> PhaseTimes {
        let mut p = self.alice.phases + self.bob.phases;
        p.offline += self.cs.offline;
        p
    }
}

pub struct PairRun<A, B> {
    pub alice: A,
    pub bob: B,
    pub report: SessionReport,
}

/// Runs the two party closures on their own threads and returns each side's
/// outcome separately, which is what fault experiments need.
pub fn run_pair_outcomes<A, B, FA, FB>(
    cfg: &SessionConfig,
    plan: &Plan,
    fa: FA,
    fb: FB,
) -> Result<(Result<A>, Result<B>, SessionReport)>
where
    A: Send,
    B: Send,
    FA: FnOnce(&mut PartySession) -> Result<A> + Send,
    FB: FnOnce(&mut PartySession) -> Result<B> + Send,
{
    let SessionPair {
        mut alice,
        mut bob,
        cs,
    } = connect_parties(cfg, plan)?;
    let (ra, rb, rep_a, rep_b) = thread::scope(|scope| {
        let h = scope.spawn(move || {
            let r = fa(&mut alice);
            let leftover = alice.pending_triples();
            (check_drained(r, leftover), alice.report())
        });
        let rb = fb(&mut bob);
        let leftover = bob.pending_triples();
        let rb = check_drained(rb, leftover);
        let rep_b = bob.report();
        drop(bob);
        let (ra, rep_a) = h.join().expect("alice thread panicked");
        (ra, rb, rep_a, rep_b)
    });
    let cs = cs.join()?;
    Ok((
        ra,
        rb,
        SessionReport {
            alice: rep_a,
            bob: rep_b,
            cs,
        },
    ))
}

fn check_drained<T>(r: Result<T>, leftover: usize) -> Result<T> {
    match r {
        Ok(_) if leftover > 0 => Err(Error::Preprocessing(format!(
            "{leftover} triples left unused; the plan does not match the computation"
        ))),
        other => other,
    }
}

/// Like [`run_pair_outcomes`] but fails if either party fails, preferring the
/// error that caused the abort over the peer's "aborted" notice.
pub fn run_pair<A, B, FA, FB>(cfg: &SessionConfig, plan: &Plan, fa: FA, fb: FB) -> Result<PairRun<A, B>>
where
    A: Send,
    B: Send,
    FA: FnOnce(&mut PartySession) -> Result<A> + Send,
    FB: FnOnce(&mut PartySession) -> Result<B> + Send,
{
    let (ra, rb, report) = run_pair_outcomes(cfg, plan, fa, fb)?;
    match (ra, rb) {
        (Ok(alice), Ok(bob)) => Ok(PairRun { alice, bob, report }),
        (Err(a), Err(b)) => {
            if is_echo(&a) && !is_echo(&b) {
                Err(b.context("bob"))
            } else {
                Err(a.context("alice"))
            }
        }
        (Err(a), Ok(_)) => Err(a.context("alice")),
        (Ok(_), Err(b)) => Err(b.context("bob")),
    }
}

fn is_echo(e: &Error) -> bool {
    matches!(e.root(), Error::PeerAborted(_) | Error::Disconnected)
}
