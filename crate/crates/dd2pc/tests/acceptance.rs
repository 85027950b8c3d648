//! One test per acceptance criterion. Each prints a `PASS`/`FAIL` line with
//! the measured values before asserting, so the output reads as a report.

use dd2pc::harness::{
    digit_loss_analytic, precision_experiment, run_lr_benchmark, security_theta_probability, synthetic_dataset,
    verification_failure_experiment, BenchOptions, DeltaRange, FaultOptions, PrecisionOptions, PrecisionReport, SynthSpec,
};
use dd2pc::logreg::{plain_lort_trajectory, train_secure, trajectory_drift, vertical_partition, Dataset, PartitionedDataset, TrainConfig};
use dd2pc::numerics::{Matrix, SeededRng, Vector};
use dd2pc::runtime::{audit_cs_isolation, SessionConfig, SessionReport, TransportKind};
use dd2pc::s2pm::ProtocolConfig;
use dd2pc::vector::{run_reconstructed, VectorProtocol};

const U: f64 = f64::EPSILON;

fn report(id: u32, name: &str, ok: bool, detail: String) {
    println!("criterion {id:>2} {name:<28} {}  {detail}", if ok { "PASS" } else { "FAIL" });
}

fn sweep(protocol: VectorProtocol) -> PrecisionReport {
    let opts = PrecisionOptions {
        parallel: true,
        ..PrecisionOptions::new(500, 1000, 2024)
    };
    precision_experiment(protocol, &DeltaRange::SWEEP, &opts).unwrap()
}

#[test]
fn criterion_01_hadamard_exactness() {
    let bound = 1.25 * 4.0 * U;
    let r = sweep(VectorProtocol::Hadamard);
    let mut ok = true;
    for g in &r.ranges {
        let pass = g.mre <= bound && g.failed_sessions == 0;
        ok &= pass;
        report(1, &format!("s2php mre x={}", g.x), pass, format!("mre {:.3e} (bound {bound:.3e}), are {:.3e}", g.mre, g.are));
    }
    assert!(ok);
}

#[test]
fn criterion_02_sigmoid_exactness() {
    let r = sweep(VectorProtocol::Sigmoid);
    let mut ok = true;
    for g in &r.ranges {
        let mre = g.mre <= 1.11e-12;
        let range = g.min_value >= -1e-12 && g.max_value <= 1.0 + 1e-12;
        let sat = g.saturated_max_abs_error <= 1e-12;
        let pass = mre && range && sat && g.failed_sessions == 0;
        ok &= pass;
        report(
            2,
            &format!("s2ps x={}", g.x),
            pass,
            format!(
                "mre {:.3e}, values [{:.3e}, {:.3e}], {} saturated with max err {:.3e}, {} failed sessions",
                g.mre, g.min_value, g.max_value, g.saturated, g.saturated_max_abs_error, g.failed_sessions
            ),
        );
    }
    assert!(ok);
}

#[test]
fn criterion_03_verification_soundness() {
    let opts = FaultOptions {
        parallel: true,
        ..FaultOptions::default()
    };
    let mut ok = true;
    for l in [1u32, 2, 4] {
        let r = verification_failure_experiment(l, 1.0, 10_000, 30 + l as u64, &opts).unwrap();
        let bound = 4f64.powi(-(l as i32));
        let sigma = (bound * (1.0 - bound) / r.trials as f64).sqrt();
        let pass = r.miss_rate <= bound + 3.0 * sigma && r.other_errors == 0;
        ok &= pass;
        report(3, &format!("tampered l={l}"), pass, format!("both-accept {:.5} <= {:.5}", r.miss_rate, bound + 3.0 * sigma));
    }
    let honest = verification_failure_experiment(20, 0.0, 10_000, 39, &opts).unwrap();
    let pass = honest.both_accepted == honest.trials;
    ok &= pass;
    report(3, "honest runs", pass, format!("{}/{} accepted", honest.both_accepted, honest.trials));
    assert!(ok);
}

fn operands(n: usize, seed: u64) -> (Vector, Vector) {
    let mut rng = SeededRng::new(seed);
    let r = DeltaRange { x: 4 };
    (r.vector(n, &mut rng).unwrap().map(f64::abs), r.vector(n, &mut rng).unwrap().map(f64::abs))
}

fn protocol_sessions() -> Vec<(String, u64, SessionReport)> {
    let (a, b) = operands(32, 40);
    let mut out = Vec::new();
    for transport in [TransportKind::Mem, TransportKind::Tcp] {
        for batched in [true, false] {
            for p in VectorProtocol::ALL {
                let cfg = SessionConfig::new(41)
                    .with_transport(transport)
                    .with_protocol(ProtocolConfig::default().with_batching(batched));
                let (_, rep) = run_reconstructed(p, &cfg, &a, &b).unwrap();
                out.push((format!("{p} {transport:?} batched={batched}"), rep.rounds(), rep));
            }
        }
    }
    out
}

#[test]
fn criterion_04_round_counts() {
    let mut ok = true;
    for (label, rounds, _) in protocol_sessions() {
        let want = match (label.split(' ').next().unwrap(), label.ends_with("true")) {
            ("s2php", _) => 6,
            ("s2patp", _) => 7,
            ("s2pr", true) => 11,
            ("s2pr", false) => 13,
            ("s2ps", true) => 15,
            ("s2ps", false) => 19,
            other => panic!("unexpected session {other:?}"),
        };
        let pass = rounds == want;
        ok &= pass;
        report(4, &label, pass, format!("{rounds} rounds (want {want})"));
    }
    assert!(ok);
}

#[test]
fn criterion_05_payload_accounting() {
    let mut ok = true;
    for n in [100usize, 500] {
        let (a, b) = operands(n, n as u64);
        let (_, rep) = run_reconstructed(VectorProtocol::Hadamard, &SessionConfig::new(50), &a, &b).unwrap();
        let (n64, rho) = (n as u64, 2u64);
        let want = (4 * n64 * rho * rho + 7 * n64 * n64) * 64;
        let pass = rep.payload_bits() == want;
        ok &= pass;
        report(5, &format!("s2php payload n={n}"), pass, format!("{} bits (want {want})", rep.payload_bits()));
    }
    assert!(ok);
}

#[test]
fn criterion_06_practical_security_law() {
    let mut ok = true;
    for theta in [3.0, 1e2, 1e4] {
        let r = security_theta_probability(theta, 1_000_000, 60).unwrap();
        let want = 1.0 - 2.0 / (theta + 1.0);
        let sigma = (want * (1.0 - want) / r.trials as f64).sqrt();
        let mut pass = (r.estimate - want).abs() <= 3.0 * sigma;
        if theta == 1e4 {
            pass &= r.estimate >= 0.9998 - 3.0 * sigma;
        }
        ok &= pass;
        report(
            6,
            &format!("P(theta={theta})"),
            pass,
            format!("estimate {:.6}, law {want:.6} ± {:.6}, fixed-A law {:.6}", r.estimate, 3.0 * sigma, 1.0 - 1.0 / theta),
        );
    }
    assert!(ok);
}

/// Rounds to three significant figures.
fn sig3(x: f64) -> f64 {
    let e = x.abs().log10().floor() as i32 - 2;
    (x / 10f64.powi(e)).round() * 10f64.powi(e)
}

#[test]
fn criterion_07_digit_loss_law() {
    let mut ok = true;
    for (d, quoted) in [(3u32, 0.197), (4, 0.0244)] {
        let pr = digit_loss_analytic(500, d);
        let pass = (sig3(pr) - quoted).abs() < 1e-12;
        ok &= pass;
        report(7, &format!("Pr(500,{d})"), pass, format!("{pr:.6} -> {} (quoted {quoted})", sig3(pr)));
    }
    assert!(ok);
}

fn benchmark_config(seed: u64) -> TrainConfig {
    TrainConfig {
        eta: 0.05,
        batch_size: 32,
        iterations: 5,
        seed,
        ..TrainConfig::default()
    }
}

#[test]
fn criterion_08_training_parity() {
    let mut ok = true;
    let mut rng = SeededRng::new(80);
    let mut worst = 0f64;
    for k in 0..20u64 {
        let n = 4 + rng.below(61);
        let d = 1 + rng.below(8);
        let mut b = 2 + rng.below(n - 1);
        while n % b == 1 {
            b += 1;
        }
        let x = Matrix::from_fn(n, d, |_, _| rng.uniform(0.0, 1.0));
        let y = Vector::new((0..n).map(|_| rng.below(2) as f64).collect()).unwrap();
        let cfg = TrainConfig {
            eta: 0.1,
            batch_size: b,
            iterations: 10,
            seed: k,
            ..TrainConfig::default()
        };
        let (xa, xb) = vertical_partition(&x, rng.below(d + 1)).unwrap();
        let run = train_secure(&PartitionedDataset::new(xa, xb, y.clone()).unwrap(), &cfg).unwrap();
        let plain = plain_lort_trajectory(&x, &y, &cfg).unwrap();
        let drift = trajectory_drift(&run.trajectory, &plain).unwrap();
        worst = worst.max(drift.iter().copied().fold(0.0, f64::max));
    }
    let pass = worst <= 1e-6;
    ok &= pass;
    report(8, "small-dataset trajectories", pass, format!("20 datasets, worst drift {worst:.3e}"));

    let dir = tempfile::tempdir().unwrap();
    for (name, spec, train_rows) in [("raisin", SynthSpec::RAISIN, 720), ("german", SynthSpec::GERMAN, 800)] {
        let path = dir.path().join(format!("{name}.csv"));
        synthetic_dataset(spec, 81).unwrap().save_csv(&path).unwrap();
        let data = Dataset::load_csv(&path).unwrap();
        let opts = BenchOptions {
            name: name.into(),
            train_rows,
            split_point: data.features() / 2,
            threshold: 0.5,
            transport: TransportKind::Mem,
        };
        let r = run_lr_benchmark(&data, &opts, &benchmark_config(82)).unwrap();
        let pass = r.accuracy_gap <= 0.01;
        ok &= pass;
        report(
            8,
            &format!("{name}-format csv"),
            pass,
            format!("secure {:.4} plain {:.4} gap {:.4}", r.secure.accuracy, r.plain.accuracy, r.accuracy_gap),
        );
    }
    assert!(ok);
}

#[test]
fn criterion_09_cs_isolation() {
    let mut sessions = protocol_sessions();
    let data = synthetic_dataset(SynthSpec { rows: 64, features: 6, separable: false, sharpness: 2.0 }, 90).unwrap();
    let run = train_secure(&PartitionedDataset::from_dataset(&data, 3).unwrap(), &benchmark_config(91)).unwrap();
    sessions.push(("training".into(), run.report.rounds(), run.report));
    let mut ok = true;
    let mut frames = 0;
    for (label, _, rep) in &sessions {
        if let Err(e) = audit_cs_isolation(&rep.cs.transcript, &[&rep.alice.transcript, &rep.bob.transcript]) {
            ok = false;
            println!("  {label}: {e}");
        }
        frames += rep.cs.transcript.entries.len();
    }
    report(9, "cs transcript audit", ok, format!("{} sessions, {frames} cs frames", sessions.len()));
    assert!(ok);
}

#[test]
fn criterion_10_determinism() {
    let (a, b) = operands(64, 100);
    let mut ok = true;
    for p in VectorProtocol::ALL {
        let cfg = SessionConfig::new(101);
        let (r1, s1) = run_reconstructed(p, &cfg, &a, &b).unwrap();
        let (r2, s2) = run_reconstructed(p, &cfg, &a, &b).unwrap();
        let pass = r1.as_slice() == r2.as_slice()
            && s1.alice.transcript.fingerprint() == s2.alice.transcript.fingerprint()
            && s1.bob.transcript.fingerprint() == s2.bob.transcript.fingerprint()
            && s1.cs.transcript.fingerprint() == s2.cs.transcript.fingerprint();
        ok &= pass;
        report(10, &format!("{p} rerun"), pass, format!("{} frames identical", s1.joint().entries.len()));
    }
    let data = synthetic_dataset(SynthSpec { rows: 64, features: 4, separable: false, sharpness: 2.0 }, 102).unwrap();
    let part = PartitionedDataset::from_dataset(&data, 2).unwrap();
    let t1 = train_secure(&part, &benchmark_config(103)).unwrap();
    let t2 = train_secure(&part, &benchmark_config(103)).unwrap();
    let pass = t1.model == t2.model && t1.trajectory == t2.trajectory && t1.report.joint().fingerprint() == t2.report.joint().fingerprint();
    ok &= pass;
    report(10, "training rerun", pass, format!("{} frames", t1.report.joint().entries.len()));

    let opts = PrecisionOptions::new(50, 5, 104);
    let pass = precision_experiment(VectorProtocol::Sigmoid, &DeltaRange::SWEEP[..2], &opts).unwrap()
        == precision_experiment(VectorProtocol::Sigmoid, &DeltaRange::SWEEP[..2], &opts).unwrap();
    ok &= pass;
    report(10, "precision report rerun", pass, String::new());
    assert!(ok);
}
