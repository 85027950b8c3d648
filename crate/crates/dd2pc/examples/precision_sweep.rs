//! MRE/ARE of the four vector protocols over the δ-range sweep.
//!
//! cargo run --release --example precision_sweep -- [trials] [n]

use dd2pc::harness::{precision_experiment, DeltaRange, PrecisionOptions};
use dd2pc::vector::VectorProtocol;

fn main() -> dd2pc::Result<()> {
    let mut args = std::env::args().skip(1);
    let trials = args.next().and_then(|s| s.parse().ok()).unwrap_or(20);
    let n = args.next().and_then(|s| s.parse().ok()).unwrap_or(500);
    let mut opts = PrecisionOptions::new(n, trials, 7);
    opts.parallel = true;
    println!("{:<7} {:>3} {:>12} {:>12} {:>9}", "proto", "x", "MRE", "ARE", "failures");
    for p in VectorProtocol::ALL {
        let t0 = std::time::Instant::now();
        let report = precision_experiment(p, &DeltaRange::SWEEP, &opts)?;
        for r in &report.ranges {
            println!("{:<7} {:>3} {:>12.3e} {:>12.3e} {:>9}", p, r.x, r.mre, r.are, r.failed_sessions);
        }
        println!("  ({:.1?})", t0.elapsed());
    }
    Ok(())
}
