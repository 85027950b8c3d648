//! Element-wise product of two privately held vectors.

use dd2pc::numerics::Vector;
use dd2pc::runtime::SessionConfig;
use dd2pc::vector::run_s2php;

fn main() -> dd2pc::Result<()> {
    let a = Vector::new(vec![1.234_567_890_123_45e3, -7.5, 0.001, 9.99e-8])?;
    let b = Vector::new(vec![-2.0, 3.25, 1e6, 4.2])?;

    // Masks are sized once for the whole batch, so the absolute error follows
    // the largest product and the tiny last entry loses relative precision.
    let (shares, report) = run_s2php(&SessionConfig::new(1), &a, &b)?;
    let got = shares.reconstruct()?;
    let want = a.hadamard(&b)?;
    for i in 0..a.len() {
        let rel = ((got.get(i) - want.get(i)) / want.get(i)).abs();
        println!("{:>12.6e} × {:>12.6e} = {:>14.8e}  rel err {rel:.1e}", a.get(i), b.get(i), got.get(i));
    }
    // 2 CS bundles + 4 party messages.
    println!("rounds {}", report.rounds());
    Ok(())
}
