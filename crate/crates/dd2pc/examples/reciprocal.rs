//! 1/(a+b) from additive shares, including the guard on tiny denominators.

use dd2pc::numerics::Vector;
use dd2pc::runtime::SessionConfig;
use dd2pc::vector::run_s2pr;

fn main() -> dd2pc::Result<()> {
    let a = Vector::new(vec![3.0, -0.5, 100.0, 1e-3])?;
    let b = Vector::new(vec![1.0, -0.25, -50.0, 2e-3])?;
    let (shares, report) = run_s2pr(&SessionConfig::new(3), &a, &b)?;
    let got = shares.reconstruct()?;
    for i in 0..a.len() {
        let x = a.get(i) + b.get(i);
        println!("1/{x:<8} = {:<22} (plaintext {})", got.get(i), 1.0 / x);
    }
    println!("rounds {}", report.rounds());

    // a+b = 0 is refused by Bob before anything is inverted.
    let zero = Vector::new(vec![1.0, 2.0])?;
    let neg = Vector::new(vec![-1.0, 1.0])?;
    match run_s2pr(&SessionConfig::new(4), &zero, &neg) {
        Ok(_) => println!("unexpected success"),
        Err(e) => println!("degenerate input rejected: {e}"),
    }
    Ok(())
}
