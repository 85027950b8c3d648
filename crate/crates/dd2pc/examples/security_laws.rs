//! Masking-game Monte Carlo and digit-loss probabilities.

use dd2pc::harness::{digit_loss_probability, security_theta_probability};

fn main() -> dd2pc::Result<()> {
    println!("{:>8} {:>10} {:>12} {:>12}", "theta", "estimate", "1-2/(θ+1)", "1-1/θ");
    for theta in [2.0, 3.0, 10.0, 100.0, 1e4] {
        let r = security_theta_probability(theta, 100_000, 1)?;
        println!("{:>8} {:>10.5} {:>12.5} {:>12.5}", theta, r.estimate, r.support_law, r.fixed_a_law);
    }
    println!();
    println!("{:>4} {:>3} {:>10} {:>10}", "n", "d", "analytic", "simulated");
    for (n, d) in [(1, 1), (100, 2), (500, 3), (500, 4)] {
        let r = digit_loss_probability(n, d, 20_000, 2)?;
        println!("{:>4} {:>3} {:>10.5} {:>10.5}", n, d, r.analytic, r.empirical);
    }
    Ok(())
}
