use dd2pc::numerics::Vector;
use dd2pc::runtime::SessionConfig;
use dd2pc::vector::{run_s2patp, run_s2php, run_s2pr, run_s2ps};

fn v(xs: &[f64]) -> Vector {
    Vector::new(xs.to_vec()).unwrap()
}

fn max_rel(got: &Vector, want: &[f64]) -> f64 {
    got.iter()
        .zip(want)
        .map(|(&g, &w)| if w == 0.0 { g.abs() } else { ((g - w) / w).abs() })
        .fold(0.0, f64::max)
}

#[test]
fn hadamard_small() {
    let (sh, rep) = run_s2php(&SessionConfig::new(1), &v(&[2.0, -3.0]), &v(&[4.0, 5.0])).unwrap();
    let r = sh.reconstruct().unwrap();
    assert!(max_rel(&r, &[8.0, -15.0]) <= 1.11e-15, "{r:?}");
    assert_eq!(rep.rounds(), 6);
}

#[test]
fn hadamard_of_zero_is_zero() {
    let (sh, _) = run_s2php(&SessionConfig::new(2), &v(&[0.0, 0.0, 0.0]), &v(&[1.5, -2.0, 7.0])).unwrap();
    // Mask cross terms cancel only to rounding at the scale of b.
    let got = sh.reconstruct().unwrap().max_abs();
    assert!(got <= 64.0 * f64::EPSILON * 7.0, "{got:e}");
}

#[test]
fn add_to_product_small() {
    let (sh, rep) = run_s2patp(&SessionConfig::new(3), &v(&[1.0]), &v(&[2.0])).unwrap();
    let r = sh.reconstruct().unwrap();
    assert!(max_rel(&r, &[3.0]) <= 1e-12, "{r:?}");
    assert!(sh.v_a.iter().all(|&x| x != 0.0));
    assert_eq!(rep.rounds(), 7);
}

#[test]
fn reciprocal_small() {
    let (sh, rep) = run_s2pr(&SessionConfig::new(4), &v(&[1.0, 3.0, -1.0]), &v(&[1.0, -1.0, 3.0])).unwrap();
    let r = sh.reconstruct().unwrap();
    assert!(max_rel(&r, &[0.5, 0.5, 0.5]) <= 1.11e-12, "{r:?}");
    assert_eq!(rep.rounds(), 11);
}

#[test]
fn sigmoid_small() {
    let ln3 = 3f64.ln();
    let (sh, rep) = run_s2ps(&SessionConfig::new(5), &v(&[0.0, 0.5 * ln3, -150.0, 80.0]), &v(&[0.0, 0.5 * ln3, 20.0, 50.0])).unwrap();
    let r = sh.reconstruct().unwrap();
    assert!((r.get(0) - 0.5).abs() <= 1e-12, "{r:?}");
    assert!((r.get(1) - 0.75).abs() <= 1e-12, "{r:?}");
    assert!(r.get(2).abs() <= 1e-12, "{r:?}");
    assert!((r.get(3) - 1.0).abs() <= 1e-12, "{r:?}");
    assert_eq!(rep.rounds(), 15);
}
