//! Same Hadamard session over in-process channels and over TCP loopback,
//! with an injected one-way latency on the second run.

use std::time::{Duration, Instant};

use dd2pc::numerics::Vector;
use dd2pc::runtime::{SessionConfig, TransportKind};
use dd2pc::transport::LinkModel;
use dd2pc::vector::run_s2php;

fn main() -> dd2pc::Result<()> {
    let a = Vector::new((0..64).map(|i| i as f64 * 0.37 - 5.0).collect())?;
    let b = Vector::new((0..64).map(|i| 1.0 / (i as f64 + 1.0)).collect())?;

    let mem = SessionConfig::new(21);
    let tcp = mem.clone().with_transport(TransportKind::Tcp);
    let (s_mem, _) = run_s2php(&mem, &a, &b)?;
    let (s_tcp, r_tcp) = run_s2php(&tcp, &a, &b)?;
    let same = s_mem.v_a.as_slice() == s_tcp.v_a.as_slice() && s_mem.v_b.as_slice() == s_tcp.v_b.as_slice();
    println!("shares bit-identical across transports: {same}");
    println!("tcp rounds {}  payload {} bits", r_tcp.rounds(), r_tcp.payload_bits());

    let slow = tcp.with_link(LinkModel::latency_ms(20));
    let t0 = Instant::now();
    let (_, r) = run_s2php(&slow, &a, &b)?;
    let wall = t0.elapsed();
    println!(
        "20 ms latency: {wall:.2?} wall, {} rounds × 20 ms = {:?}",
        r.rounds(),
        Duration::from_millis(20) * r.rounds() as u32
    );
    Ok(())
}
