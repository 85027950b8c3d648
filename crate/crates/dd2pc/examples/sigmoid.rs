//! σ(a+b) on additive shares, compared with the plaintext logistic function.

use dd2pc::logreg::sigmoid;
use dd2pc::numerics::Vector;
use dd2pc::runtime::SessionConfig;
use dd2pc::vector::run_s2ps;

fn main() -> dd2pc::Result<()> {
    let a = Vector::new(vec![-3.0, 0.0, 0.7, 2.5, 60.0, -70.0])?;
    let b = Vector::new(vec![1.0, 0.0, -1.2, 1.5, 50.0, -40.0])?;
    let (shares, report) = run_s2ps(&SessionConfig::new(5), &a, &b)?;
    let got = shares.reconstruct()?;
    println!("{:>8} {:>22} {:>22}", "x", "secure", "plaintext");
    for i in 0..a.len() {
        let x = a.get(i) + b.get(i);
        println!("{x:>8} {:>22.16} {:>22.16}", got.get(i), sigmoid(x));
    }
    println!("rounds {}", report.rounds());
    Ok(())
}
