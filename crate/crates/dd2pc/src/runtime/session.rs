use std::collections::VecDeque;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{Matrix, SeededRng};
use crate::s2pm::{decode_bundle, FaultInjection, MaskTriple, Plan, PreprocessRequest, ProtocolConfig, Side};
use crate::transport::{Direction, Frame, Hello, Link, LinkModel, Role, SessionId, Tag, Transcript};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TransportKind {
    Mem,
    Tcp,
}

impl std::str::FromStr for TransportKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mem" => Ok(TransportKind::Mem),
            "tcp" => Ok(TransportKind::Tcp),
            other => Err(Error::invalid(format!("unknown transport '{other}'"))),
        }
    }
}

/// Everything needed to stand up one session.
#[derive(Clone, Debug, PartialEq)]
pub struct SessionConfig {
    pub id: SessionId,
    /// Root seed; Alice, Bob and the CS each fork their own stream from it.
    pub seed: u64,
    pub protocol: ProtocolConfig,
    pub transport: TransportKind,
    pub link: LinkModel,
    /// Per-message receive timeout.
    pub timeout: Duration,
}

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(30);

impl SessionConfig {
    pub fn new(seed: u64) -> Self {
        SessionConfig {
            id: SessionId::derive(seed),
            seed,
            protocol: ProtocolConfig::default(),
            transport: TransportKind::Mem,
            link: LinkModel::default(),
            timeout: DEFAULT_TIMEOUT,
        }
    }

    pub fn with_protocol(mut self, protocol: ProtocolConfig) -> Self {
        self.protocol = protocol;
        self
    }

    pub fn with_transport(mut self, transport: TransportKind) -> Self {
        self.transport = transport;
        self
    }

    pub fn with_link(mut self, link: LinkModel) -> Self {
        self.link = link;
        self
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout = timeout;
        self
    }

    pub(crate) fn party_rng(&self, role: Role) -> SeededRng {
        SeededRng::new(self.seed).fork(&role.to_string())
    }
}

/// Where a session spent its time.
///
/// Offline covers waiting for and decoding CS bundles; communication covers
/// party-to-party sends and receives, blocking included; online is the rest.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseTimes {
    pub offline: Duration,
    pub online: Duration,
    pub verification: Duration,
    pub communication: Duration,
}

impl PhaseTimes {
    pub fn total(&self) -> Duration {
        self.offline + self.online + self.verification + self.communication
    }

    pub fn verification_share(&self) -> f64 {
        let total = self.total().as_secs_f64();
        if total == 0.0 {
            0.0
        } else {
            self.verification.as_secs_f64() / total
        }
    }
}

impl std::ops::Add for PhaseTimes {
    type Output = PhaseTimes;
    fn add(self, o: PhaseTimes) -> PhaseTimes {
        PhaseTimes {
            offline: self.offline + o.offline,
            online: self.online + o.online,
            verification: self.verification + o.verification,
            communication: self.communication + o.communication,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartyReport {
    pub role: Role,
    pub transcript: Transcript,
    pub phases: PhaseTimes,
    pub elapsed: Duration,
}

/// One data holder's end of a session: links to the peer and the CS, its own
/// randomness, queued mask triples and a transcript of every frame.
pub struct PartySession {
    role: Role,
    id: SessionId,
    peer: Box<dyn Link>,
    cs: Option<Box<dyn Link>>,
    timeout: Duration,
    rng: SeededRng,
    config: ProtocolConfig,
    transcript: Transcript,
    triples: VecDeque<MaskTriple>,
    phases: PhaseTimes,
    started: Instant,
    fault: Option<FaultInjection>,
    aborted: bool,
}

impl PartySession {
    pub fn new(role: Role, cfg: &SessionConfig, peer: Box<dyn Link>, cs: Box<dyn Link>) -> Result<Self> {
        if !matches!(role, Role::Alice | Role::Bob) {
            return Err(Error::invalid(format!("party sessions belong to alice or bob, not {role}")));
        }
        cfg.protocol.validate()?;
        Ok(PartySession {
            role,
            id: cfg.id,
            peer,
            cs: Some(cs),
            timeout: cfg.timeout,
            rng: cfg.party_rng(role),
            config: cfg.protocol,
            transcript: Transcript::new(role),
            triples: VecDeque::new(),
            phases: PhaseTimes::default(),
            started: Instant::now(),
            fault: None,
            aborted: false,
        })
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn id(&self) -> SessionId {
        self.id
    }

    pub fn config(&self) -> &ProtocolConfig {
        &self.config
    }

    pub fn config_mut(&mut self) -> &mut ProtocolConfig {
        &mut self.config
    }

    pub(crate) fn rng(&mut self) -> &mut SeededRng {
        &mut self.rng
    }

    pub fn transcript(&self) -> &Transcript {
        &self.transcript
    }

    pub fn pending_triples(&self) -> usize {
        self.triples.len()
    }

    pub fn phases(&self) -> PhaseTimes {
        let elapsed = self.started.elapsed();
        let p = self.phases;
        PhaseTimes {
            online: elapsed.saturating_sub(p.offline + p.verification + p.communication),
            ..p
        }
    }

    pub fn report(&self) -> PartyReport {
        PartyReport {
            role: self.role,
            transcript: self.transcript.clone(),
            phases: self.phases(),
            elapsed: self.started.elapsed(),
        }
    }

    /// Perturbs the next S2PM call in which this party holds the right operand.
    pub fn arm_fault(&mut self, fault: FaultInjection) {
        self.fault = Some(fault);
    }

    pub(crate) fn take_fault(&mut self) -> Option<FaultInjection> {
        self.fault.take()
    }

    fn link(&mut self, to: Role) -> Result<&mut Box<dyn Link>> {
        if to == Role::Cs {
            self.cs
                .as_mut()
                .ok_or_else(|| Error::Preprocessing("CS link already closed".into()))
        } else {
            Ok(&mut self.peer)
        }
    }

    fn send_frame(&mut self, to: Role, frame: Frame) -> Result<()> {
        let elements = frame.numeric_elements()?;
        let at = self.started.elapsed();
        self.transcript.record(Direction::Sent, to, &frame, elements, at);
        let t0 = Instant::now();
        let sent = self.link(to).and_then(|l| l.send(frame));
        self.phases.communication += t0.elapsed();
        if sent.is_err() {
            self.transcript.entries.pop();
        }
        sent
    }

    fn recv_frame(&mut self, from: Role) -> Result<Frame> {
        let t0 = Instant::now();
        let timeout = self.timeout;
        let frame = self.link(from)?.recv(timeout)?;
        self.phases.communication += t0.elapsed();
        let elements = frame.numeric_elements()?;
        let at = self.started.elapsed();
        self.transcript.record(Direction::Received, from, &frame, elements, at);
        if frame.tag == Tag::Abort {
            return Err(Error::PeerAborted(String::from_utf8_lossy(&frame.payload).into_owned()));
        }
        Ok(frame)
    }

    fn recv_tagged(&mut self, from: Role, tag: Tag) -> Result<Frame> {
        let frame = self.recv_frame(from)?;
        if frame.tag != tag {
            return Err(Error::UnexpectedFrame {
                expected: format!("{tag:?}"),
                got: format!("{:?}", frame.tag),
            });
        }
        Ok(frame)
    }

    pub(crate) fn send_matrices(&mut self, tag: Tag, ms: &[&Matrix]) -> Result<()> {
        let mut payload = Vec::with_capacity(ms.iter().map(|m| m.encoded_len()).sum());
        for m in ms {
            m.write_to(&mut payload);
        }
        let to = self.role.other();
        self.send_frame(to, Frame::new(tag, payload))
    }

    pub(crate) fn recv_matrices(&mut self, tag: Tag, count: usize) -> Result<Vec<Matrix>> {
        let from = self.role.other();
        let frame = self.recv_tagged(from, tag)?;
        let mut at = 0;
        let mut out = Vec::with_capacity(count);
        for _ in 0..count {
            let (m, used) = Matrix::read_from(&frame.payload[at..])?;
            at += used;
            out.push(m);
        }
        if at != frame.payload.len() {
            return Err(Error::Malformed(format!("{:?} frame has trailing bytes", tag)));
        }
        Ok(out)
    }

    pub(crate) fn recv_matrix(&mut self, tag: Tag) -> Result<Matrix> {
        Ok(self.recv_matrices(tag, 1)?.remove(0))
    }

    /// Sends hellos to the peer and the CS.
    pub fn send_hellos(&mut self) -> Result<()> {
        let hello = Hello::new(self.role, self.id).to_frame();
        self.send_frame(self.role.other(), hello.clone())?;
        self.send_frame(Role::Cs, hello)
    }

    /// Checks the peer's and the CS's hellos.
    pub fn expect_hellos(&mut self) -> Result<()> {
        let other = self.role.other();
        Hello::from_frame(&self.recv_tagged(other, Tag::Hello)?)?.check(other, self.id)?;
        Hello::from_frame(&self.recv_tagged(Role::Cs, Tag::Hello)?)?.check(Role::Cs, self.id)
    }

    /// Asks the CS for every triple in `plan`. Only Alice sends the request.
    pub fn request_preprocessing(&mut self, plan: &Plan) -> Result<()> {
        if self.role != Role::Alice {
            return Err(Error::invalid("only alice sends the preprocessing request"));
        }
        let request = PreprocessRequest {
            batched: self.config.batch_preprocessing,
            mask: self.config.mask,
            plan: plan.clone(),
        };
        let frame = request.to_frame()?;
        self.send_frame(Role::Cs, frame)
    }

    /// Receives bundles until `expected` triples are queued, then drops the
    /// CS link: nothing after this point involves the CS.
    pub fn drain_preprocessing(&mut self, expected: usize) -> Result<()> {
        let t0 = Instant::now();
        let comm_before = self.phases.communication;
        while self.triples.len() < expected {
            let frame = self.recv_tagged(Role::Cs, Tag::TripleBundle)?;
            self.triples.extend(decode_bundle(&frame)?);
        }
        if self.triples.len() != expected {
            return Err(Error::Preprocessing(format!(
                "CS delivered {} triples, plan needs {expected}",
                self.triples.len()
            )));
        }
        self.cs = None;
        self.phases.communication = comm_before;
        self.phases.offline += t0.elapsed();
        Ok(())
    }

    /// Full opening sequence for a party whose links are already connected.
    pub fn open(&mut self, plan: &Plan) -> Result<()> {
        self.send_hellos()?;
        self.expect_hellos()?;
        if self.role == Role::Alice {
            self.request_preprocessing(plan)?;
        }
        self.drain_preprocessing(plan.len())
    }

    pub(crate) fn take_triple(&mut self, side: Side) -> Result<MaskTriple> {
        let t = self
            .triples
            .pop_front()
            .ok_or_else(|| Error::Preprocessing("no mask triple left; the plan is shorter than the computation".into()))?;
        if t.side != side {
            return Err(Error::Preprocessing(format!(
                "next triple is for the {:?} side but {:?} was needed; plan and computation disagree",
                t.side, side
            )));
        }
        Ok(t)
    }

    pub(crate) fn time_verification<T>(&mut self, f: impl FnOnce(&mut SeededRng) -> T) -> T {
        let t0 = Instant::now();
        let out = f(&mut self.rng);
        self.phases.verification += t0.elapsed();
        out
    }

    /// Best-effort notice to the peer; sent at most once per session.
    pub(crate) fn abort(&mut self, reason: &str) {
        if self.aborted {
            return;
        }
        self.aborted = true;
        let to = self.role.other();
        let _ = self.send_frame(to, Frame::new(Tag::Abort, reason.as_bytes().to_vec()));
    }

    /// Runs `f`; a local failure is reported to the peer before returning so
    /// it does not sit waiting for a message that will never come.
    pub fn guard<T>(&mut self, f: impl FnOnce(&mut Self) -> Result<T>) -> Result<T> {
        let out = f(self);
        if let Err(e) = &out {
            if !matches!(e.root(), Error::PeerAborted(_) | Error::Disconnected) {
                self.abort(&e.to_string());
            }
        }
        out
    }

    /// Sends this party's final share to a client endpoint.
    pub fn send_result(&mut self, client: &mut dyn Link, share: &Matrix) -> Result<()> {
        let hello = Hello::new(self.role, self.id).to_frame();
        let frame = Frame::new(Tag::ResultShare, share.to_bytes());
        let elements = frame.numeric_elements()?;
        let at = self.started.elapsed();
        self.transcript.record(Direction::Sent, Role::Client, &hello, 0, at);
        self.transcript.record(Direction::Sent, Role::Client, &frame, elements, at);
        client.send(hello)?;
        client.send(frame)
    }
}
