//! Verified two-party A×B: Alice holds A, Bob holds B, each ends with a share.

use dd2pc::numerics::Matrix;
use dd2pc::runtime::SessionConfig;
use dd2pc::s2pm::run_s2pm;

fn main() -> dd2pc::Result<()> {
    let a = Matrix::from_rows(&[vec![1.5, -2.0, 0.25], vec![3.0, 4.0, -1.0]])?;
    let b = Matrix::from_rows(&[vec![2.0, 1.0], vec![-0.5, 0.0], vec![8.0, 3.0]])?;

    let (v_a, v_b, report) = run_s2pm(&SessionConfig::new(42), &a, &b)?;
    let got = v_a.add(&v_b)?;
    let want = a.matmul(&b)?;

    println!("alice share  {:?}", v_a.as_slice());
    println!("bob share    {:?}", v_b.as_slice());
    println!("sum          {:?}", got.as_slice());
    println!("plaintext    {:?}", want.as_slice());
    println!("max |err|    {:e}", got.sub(&want)?.max_abs());
    println!("rounds {}  payload {} bits", report.rounds(), report.payload_bits());
    Ok(())
}
