use dd2pc::harness::{verification_failure_experiment, FaultOptions};
use dd2pc::numerics::{Matrix, SeededRng};
use dd2pc::runtime::{audit_cs_isolation, SessionConfig};
use dd2pc::s2pm::{run_s2phm, run_s2pm, s2pm_verify, verify_tolerance, ProtocolConfig, VerifyBundle};
use dd2pc::transport::{Direction, Role, Tag};
use proptest::prelude::*;

const U: f64 = f64::EPSILON;

fn random(rows: usize, cols: usize, rng: &mut SeededRng) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.uniform(-1.0, 1.0))
}

/// Plaintext triple loop, kept apart from the library's matmul.
fn oracle_product(a: &Matrix, b: &Matrix) -> Matrix {
    Matrix::from_fn(a.rows(), b.cols(), |i, j| (0..a.cols()).map(|k| a.get(i, k) * b.get(k, j)).sum())
}

fn max_rel(got: &Matrix, want: &Matrix) -> f64 {
    let scale = want.max_abs().max(f64::MIN_POSITIVE);
    got.sub(want).unwrap().max_abs() / scale
}

#[test]
fn zero_left_operand_gives_zero() {
    let mut rng = SeededRng::new(1);
    let (va, vb, _) = run_s2pm(&SessionConfig::new(1), &Matrix::zeros(3, 4), &random(4, 2, &mut rng)).unwrap();
    assert!(va.add(&vb).unwrap().max_abs() <= 64.0 * U);
}

#[test]
fn identity_times_identity() {
    let i2 = Matrix::identity(2);
    let (va, vb, _) = run_s2pm(&SessionConfig::new(2), &i2, &i2).unwrap();
    assert!(va.add(&vb).unwrap().sub(&i2).unwrap().max_abs() <= 64.0 * U);
}

#[test]
fn random_three_by_four_product() {
    let mut rng = SeededRng::new(3);
    let (a, b) = (random(3, 4, &mut rng), random(4, 3, &mut rng));
    let (va, vb, rep) = run_s2pm(&SessionConfig::new(3), &a, &b).unwrap();
    assert!(max_rel(&va.add(&vb).unwrap(), &oracle_product(&a, &b)) <= 64.0 * U * 4.0);
    assert_eq!(rep.rounds(), 6);
}

#[test]
fn hybrid_product_cases() {
    let z = Matrix::zeros(2, 2);
    let (va, vb, _) = run_s2phm(&SessionConfig::new(4), (&z, &z), (&z, &z)).unwrap();
    assert!(va.add(&vb).unwrap().max_abs() <= 64.0 * U);

    let half = Matrix::identity(2).scale(0.5);
    let (va, vb, _) = run_s2phm(&SessionConfig::new(5), (&half, &half), (&half, &half)).unwrap();
    assert!(va.add(&vb).unwrap().sub(&Matrix::identity(2)).unwrap().max_abs() <= 64.0 * U);

    let mut rng = SeededRng::new(6);
    let (a1, a2, b1, b2) = (random(4, 3, &mut rng), random(3, 2, &mut rng), random(4, 3, &mut rng), random(3, 2, &mut rng));
    let (va, vb, _) = run_s2phm(&SessionConfig::new(6), (&a1, &a2), (&b1, &b2)).unwrap();
    let want = oracle_product(&a1.add(&b1).unwrap(), &a2.add(&b2).unwrap());
    assert!(max_rel(&va.add(&vb).unwrap(), &want) <= 256.0 * U * 3.0);
}

#[test]
fn alice_releases_only_masked_operand_and_check() {
    let mut rng = SeededRng::new(7);
    let (a, b) = (random(3, 3, &mut rng), random(3, 3, &mut rng));
    let (_, _, rep) = run_s2pm(&SessionConfig::new(7), &a, &b).unwrap();
    let sent: Vec<Tag> = rep
        .alice
        .transcript
        .entries
        .iter()
        .filter(|e| e.direction == Direction::Sent && e.peer == Role::Bob)
        .map(|e| e.tag)
        .collect();
    assert_eq!(sent, vec![Tag::Hello, Tag::MaskedLeft, Tag::LeftCheck]);
    audit_cs_isolation(&rep.cs.transcript, &[&rep.alice.transcript, &rep.bob.transcript]).unwrap();
}

#[test]
fn honest_sessions_always_accept() {
    let mut misses = 0;
    for t in 0..10_000u64 {
        let mut rng = SeededRng::new(t).fork("shape");
        let (n, s, m) = (1 + rng.below(16), 2 + rng.below(15), 1 + rng.below(16));
        let (a, b) = (random(n, s, &mut rng), random(s, m, &mut rng));
        let cfg = SessionConfig::new(t).with_protocol(ProtocolConfig::default().with_verify_rounds(4));
        if run_s2pm(&cfg, &a, &b).is_err() {
            misses += 1;
        }
    }
    assert_eq!(misses, 0);
}

#[test]
fn per_party_miss_rate_at_four_rounds() {
    let r = verification_failure_experiment(4, 1.0, 10_000, 8, &FaultOptions { parallel: true, ..FaultOptions::default() }).unwrap();
    let bound = 2f64.powi(-4);
    let sigma = (bound * (1.0 - bound) / 1e4).sqrt();
    for accepted in [r.alice_accepted, r.bob_accepted] {
        let rate = accepted as f64 / 1e4;
        assert!(rate <= bound + 3.0 * sigma, "per-party rate {rate}");
    }
    assert_eq!(r.other_errors, 0);
}

/// A bundle whose residual is exactly `magnitude` at (row, col) and zero
/// elsewhere, built from random VF halves.
fn tampered_bundle(n: usize, s: usize, m: usize, magnitude: f64, l: u32, rng: &mut SeededRng) -> VerifyBundle {
    let st = random(n, m, rng);
    let vf_a = random(n, m, rng);
    let mut vf_b = st.sub(&vf_a).unwrap();
    let (i, j) = (rng.below(n), rng.below(m));
    let bumped = Matrix::from_fn(n, m, |r, c| vf_b.get(r, c) + if (r, c) == (i, j) { magnitude } else { 0.0 });
    vf_b = bumped;
    VerifyBundle::new(vf_a, vf_b, st, l, s).unwrap()
}

#[test]
fn twenty_rounds_never_miss() {
    // Each party probes with its own stream; a miss needs both to accept.
    let mut rng = SeededRng::new(9);
    let bundle = tampered_bundle(4, 4, 4, 1.0, 20, &mut rng);
    let (mut alice, mut bob) = (rng.fork("alice"), rng.fork("bob"));
    let mut misses = 0u32;
    for _ in 0..1_000_000 {
        if s2pm_verify(&bundle, 1024.0, &mut alice).is_accepted() && s2pm_verify(&bundle, 1024.0, &mut bob).is_accepted() {
            misses += 1;
        }
    }
    assert_eq!(misses, 0);
}

#[test]
fn soundness_across_shapes_and_rounds() {
    for l in [1u32, 2, 4, 8] {
        let trials = 20_000;
        let mut rng = SeededRng::new(10).fork_index("l", l as u64);
        let mut misses = 0;
        for _ in 0..trials {
            let (n, s, m) = (1 + rng.below(8), 2 + rng.below(8), 1 + rng.below(8));
            let eps = verify_tolerance(1024.0, s, m, 2.0);
            let b = tampered_bundle(n, s, m, 1e3 * eps, l, &mut rng);
            misses += s2pm_verify(&b, 1024.0, &mut rng).is_accepted() as usize;
        }
        let bound = 2f64.powi(-(l as i32));
        let sigma = (bound * (1.0 - bound) / trials as f64).sqrt();
        let rate = misses as f64 / trials as f64;
        assert!(rate <= bound + 3.0 * sigma, "l={l}: {rate} > {bound}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn shares_reconstruct_product(n in 1usize..9, s in 2usize..9, m in 1usize..9, scale in -6i32..7, seed in any::<u64>()) {
        let mut rng = SeededRng::new(seed);
        let k = 10f64.powi(scale);
        let a = random(n, s, &mut rng).scale(k);
        let b = random(s, m, &mut rng);
        let (va, vb, _) = run_s2pm(&SessionConfig::new(seed), &a, &b).unwrap();
        let want = oracle_product(&a, &b);
        // Absolute error tracks the masks (unit scale) and the operands.
        let tol = 64.0 * U * s as f64 * (1.0 + k) * 4.0;
        prop_assert!(va.add(&vb).unwrap().sub(&want).unwrap().max_abs() <= tol);
    }
}
