use std::net::TcpStream;
use std::sync::mpsc;
use std::thread;
use std::time::Duration;

use dd2pc::numerics::{Matrix, SeededRng};
use dd2pc::runtime::CsService;
use dd2pc::s2pm::{decode_bundle, MaskConfig, Plan, PreprocessRequest};
use dd2pc::transport::{Frame, Hello, Link, Role, SessionId, Tag, TcpLink, FRAME_HEADER_BYTES};
use dd2pc::Error;
use proptest::prelude::*;

const T: Duration = Duration::from_secs(10);

#[test]
fn empty_frame_is_twelve_bytes() {
    let bytes = Frame::new(Tag::MaskedLeft, Vec::new()).encode();
    assert_eq!(bytes.len(), 12);
    assert_eq!(FRAME_HEADER_BYTES, 12);
    assert_eq!(&bytes[..4], &1u32.to_le_bytes());
    assert_eq!(&bytes[4..], &0u64.to_le_bytes());
}

#[test]
fn matrix_frame_roundtrip_is_bit_identical() {
    let mut rng = SeededRng::new(1);
    let m = Matrix::from_fn(3, 4, |_, _| rng.uniform(-1e6, 1e6));
    let f = Frame::new(Tag::MaskedRight, m.to_bytes());
    let bytes = f.encode();
    let back = Frame::decode(&bytes).unwrap();
    assert_eq!(back.encode(), bytes);
    assert_eq!(Matrix::from_bytes(&back.payload).unwrap().to_bytes(), m.to_bytes());
    assert_eq!(back.numeric_elements().unwrap(), 12);
}

#[test]
fn short_or_bad_frames_are_errors() {
    assert!(matches!(Frame::decode(&[1, 0, 0, 0, 0]), Err(Error::Truncated { .. })));
    let mut bytes = Frame::new(Tag::Hello, vec![0; 3]).encode();
    bytes[0] = 0x42;
    assert!(matches!(Frame::decode(&bytes), Err(Error::UnknownTag(0x42))));
}

proptest! {
    #[test]
    fn any_payload_roundtrips(tag in prop::sample::select(vec![
        Tag::Hello, Tag::MaskedLeft, Tag::MaskedRight, Tag::Correction, Tag::LeftCheck,
        Tag::AtpOffset, Tag::TripleBundle, Tag::PreprocessRequest, Tag::ResultShare, Tag::Abort,
    ]), payload in prop::collection::vec(any::<u8>(), 0..512)) {
        let f = Frame::new(tag, payload);
        let bytes = f.encode();
        prop_assert_eq!(bytes.len(), 12 + f.payload.len());
        prop_assert_eq!(Frame::decode(&bytes).unwrap(), f.clone());
        let mut cursor = &bytes[..];
        prop_assert_eq!(Frame::read_from(&mut cursor).unwrap(), f);
    }

    #[test]
    fn truncations_never_decode(payload in prop::collection::vec(any::<u8>(), 0..64), cut in 0usize..76) {
        let bytes = Frame::new(Tag::Abort, payload).encode();
        prop_assume!(cut < bytes.len());
        prop_assert!(matches!(Frame::decode(&bytes[..cut]), Err(Error::Truncated { .. })), "cut at {}", cut);
    }
}

fn spawn_cs(seed: u64) -> (std::net::SocketAddr, mpsc::Receiver<dd2pc::Result<dd2pc::runtime::CsReport>>) {
    let svc = CsService::bind("127.0.0.1:0", seed).unwrap().with_timeout(T);
    let addr = svc.local_addr().unwrap();
    let (tx, rx) = mpsc::channel();
    thread::spawn(move || {
        svc.serve(Some(1), move |r| {
            let _ = tx.send(r);
        })
        .unwrap();
    });
    (addr, rx)
}

fn join_cs(addr: std::net::SocketAddr, role: Role, id: SessionId) -> TcpLink {
    let mut link = TcpLink::new(TcpStream::connect(addr).unwrap()).unwrap();
    link.send(Hello::new(role, id).to_frame()).unwrap();
    let hello = Hello::from_frame(&link.recv(T).unwrap()).unwrap();
    hello.check(Role::Cs, id).unwrap();
    link
}

#[test]
fn cs_service_delivers_requested_triples() {
    let (addr, rx) = spawn_cs(5);
    let id = SessionId(77);
    let mut alice = join_cs(addr, Role::Alice, id);
    let mut bob = join_cs(addr, Role::Bob, id);
    let req = PreprocessRequest {
        batched: true,
        mask: MaskConfig::default(),
        plan: Plan::s2pm(2, 4, 2, Role::Alice).repeat(3),
    };
    alice.send(req.to_frame().unwrap()).unwrap();

    let ta = decode_bundle(&alice.recv(T).unwrap()).unwrap();
    let tb = decode_bundle(&bob.recv(T).unwrap()).unwrap();
    assert_eq!((ta.len(), tb.len()), (3, 3));
    for (a, b) in ta.iter().zip(&tb) {
        assert_eq!(a.st, b.st);
        let st = a.r_mask.matmul(&b.r_mask).unwrap();
        let sum = a.r_share.add(&b.r_share).unwrap();
        let scale = st.max_abs().max(1.0);
        assert!(sum.sub(&st).unwrap().max_abs() <= 4.0 * f64::EPSILON * scale);
    }

    let report = rx.recv_timeout(T).unwrap().unwrap();
    assert_eq!(report.triples, 3);
    assert!(report.transcript.tags().all(|t| matches!(t, Tag::Hello | Tag::PreprocessRequest | Tag::TripleBundle)));
}

#[test]
fn cs_refuses_operand_frames() {
    let (addr, rx) = spawn_cs(6);
    let id = SessionId(78);
    let mut alice = join_cs(addr, Role::Alice, id);
    let a_hat = Matrix::from_rows(&[vec![1.0, 2.0]]).unwrap();
    alice.send(Frame::new(Tag::MaskedLeft, a_hat.to_bytes())).unwrap();
    let _bob = join_cs(addr, Role::Bob, id);

    let reply = alice.recv(T).unwrap();
    assert_eq!(reply.tag, Tag::Abort);
    let err = rx.recv_timeout(T).unwrap().unwrap_err();
    assert!(matches!(err.root(), Error::CsViolation(_)), "{err}");
}

#[test]
fn cs_refuses_client_role() {
    let (addr, rx) = spawn_cs(7);
    let mut link = TcpLink::new(TcpStream::connect(addr).unwrap()).unwrap();
    link.send(Hello::new(Role::Client, SessionId(1)).to_frame()).unwrap();
    assert_eq!(link.recv(T).unwrap().tag, Tag::Abort);
    let _other = join_cs(addr, Role::Bob, SessionId(1));
    assert!(matches!(rx.recv_timeout(T).unwrap(), Err(Error::Handshake(_))));
}
