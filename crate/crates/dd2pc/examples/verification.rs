//! Tampered corrections against the randomized check, for a few values of l.
//!
//! cargo run --release --example verification -- [trials]

use dd2pc::harness::{verification_failure_experiment, FaultOptions};

fn main() -> dd2pc::Result<()> {
    let trials = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2000);
    let opts = FaultOptions {
        parallel: true,
        ..FaultOptions::default()
    };
    let honest = verification_failure_experiment(4, 0.0, trials, 9, &opts)?;
    println!("honest: {}/{} accepted by both", honest.both_accepted, honest.trials);
    println!("{:>3} {:>10} {:>10} {:>8}", "l", "miss rate", "4^-l", "ok");
    for l in [1, 2, 3, 4, 6] {
        let r = verification_failure_experiment(l, 1.0, trials, 9, &opts)?;
        println!("{:>3} {:>10.5} {:>10.5} {:>8}", l, r.miss_rate, r.bound, r.within_bound);
    }
    Ok(())
}
