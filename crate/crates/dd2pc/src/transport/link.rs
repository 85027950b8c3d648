use std::io::{self, BufReader, BufWriter};
use std::net::{Shutdown, TcpStream};
use std::sync::mpsc::{channel, Receiver, RecvTimeoutError, Sender};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::Frame;
use crate::error::{Error, Result};

/// Ordered, reliable, full-duplex frame pipe to one peer.
pub trait Link: Send {
    fn send(&mut self, frame: Frame) -> Result<()>;
    fn recv(&mut self, timeout: Duration) -> Result<Frame>;
}

impl<L: Link + ?Sized> Link for Box<L> {
    fn send(&mut self, frame: Frame) -> Result<()> {
        (**self).send(frame)
    }
    fn recv(&mut self, timeout: Duration) -> Result<Frame> {
        (**self).recv(timeout)
    }
}

/// In-process link. Frames are handed over whole; the byte codec is
/// exercised by the TCP link and the frame tests.
pub struct MemLink {
    tx: Sender<Frame>,
    rx: Receiver<Frame>,
}

pub fn mem_pair() -> (MemLink, MemLink) {
    let (tx_a, rx_b) = channel();
    let (tx_b, rx_a) = channel();
    (MemLink { tx: tx_a, rx: rx_a }, MemLink { tx: tx_b, rx: rx_b })
}

impl Link for MemLink {
    fn send(&mut self, frame: Frame) -> Result<()> {
        self.tx.send(frame).map_err(|_| Error::Disconnected)
    }

    fn recv(&mut self, timeout: Duration) -> Result<Frame> {
        match self.rx.recv_timeout(timeout) {
            Ok(frame) => Ok(frame),
            Err(RecvTimeoutError::Timeout) => Err(Error::Timeout(format!("frame after {timeout:?}"))),
            Err(RecvTimeoutError::Disconnected) => Err(Error::Disconnected),
        }
    }
}

pub struct TcpLink {
    reader: BufReader<TcpStream>,
    writer: BufWriter<TcpStream>,
}

impl TcpLink {
    pub fn new(stream: TcpStream) -> Result<Self> {
        stream.set_nodelay(true)?;
        let reader = BufReader::new(stream.try_clone()?);
        Ok(TcpLink {
            reader,
            writer: BufWriter::new(stream),
        })
    }

    pub fn peer_addr(&self) -> Option<std::net::SocketAddr> {
        self.writer.get_ref().peer_addr().ok()
    }

    pub fn shutdown(&self) {
        let _ = self.writer.get_ref().shutdown(Shutdown::Both);
    }
}

impl Link for TcpLink {
    fn send(&mut self, frame: Frame) -> Result<()> {
        frame.write_to(&mut self.writer).map_err(map_io)
    }

    fn recv(&mut self, timeout: Duration) -> Result<Frame> {
        self.reader.get_ref().set_read_timeout(Some(timeout))?;
        Frame::read_from(&mut self.reader).map_err(map_io)
    }
}

fn map_io(e: Error) -> Error {
    match e {
        Error::Io(io) => match io.kind() {
            io::ErrorKind::WouldBlock | io::ErrorKind::TimedOut => Error::Timeout("frame on tcp link".into()),
            io::ErrorKind::UnexpectedEof
            | io::ErrorKind::ConnectionReset
            | io::ErrorKind::ConnectionAborted
            | io::ErrorKind::BrokenPipe => Error::Disconnected,
            _ => Error::Io(io),
        },
        other => other,
    }
}

/// Optional delay knob: fixed one-way latency plus serialisation time.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LinkModel {
    pub latency: Duration,
    /// Bits per second; `None` means unlimited.
    pub bandwidth_bps: Option<f64>,
}

impl LinkModel {
    pub fn latency_ms(ms: u64) -> Self {
        LinkModel {
            latency: Duration::from_millis(ms),
            bandwidth_bps: None,
        }
    }

    pub fn is_instant(&self) -> bool {
        self.latency.is_zero() && self.bandwidth_bps.is_none()
    }

    fn delay_for(&self, bytes: usize) -> Duration {
        let wire = self
            .bandwidth_bps
            .map(|bps| Duration::from_secs_f64(bytes as f64 * 8.0 / bps))
            .unwrap_or_default();
        self.latency + wire
    }
}

/// Wraps a link and sleeps before each send according to the model.
pub struct Delayed<L> {
    inner: L,
    model: LinkModel,
}

impl<L: Link> Delayed<L> {
    pub fn new(inner: L, model: LinkModel) -> Self {
        Delayed { inner, model }
    }
}

impl<L: Link> Link for Delayed<L> {
    fn send(&mut self, frame: Frame) -> Result<()> {
        std::thread::sleep(self.model.delay_for(frame.encoded_len()));
        self.inner.send(frame)
    }

    fn recv(&mut self, timeout: Duration) -> Result<Frame> {
        self.inner.recv(timeout)
    }
}

/// Boxes a link, adding the delay wrapper only when the model needs one.
pub fn boxed<L: Link + 'static>(link: L, model: LinkModel) -> Box<dyn Link> {
    if model.is_instant() {
        Box::new(link)
    } else {
        Box::new(Delayed::new(link, model))
    }
}
