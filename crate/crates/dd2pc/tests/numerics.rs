use dd2pc::numerics::{
    diag2v, gen_rank_deficient, lift_left, lift_right, ra2a, rb2b, split_scalar, v2diag, Interval, Matrix, SeededRng, SplitMode,
    SplitParams, Vector,
};
use dd2pc::s2pm::{cs_preprocess, MaskConfig};
use proptest::prelude::*;

const U: f64 = f64::EPSILON;

/// Numerical rank with singular values below 1e-9·σ_max treated as zero.
fn numerical_rank(m: &Matrix) -> usize {
    let nm = nalgebra::DMatrix::from_row_slice(m.rows(), m.cols(), m.as_slice());
    let sv = nm.singular_values();
    let max = sv.max();
    sv.iter().filter(|&&s| s > 1e-9 * max).count()
}

fn unit() -> Interval {
    Interval::new(-1.0, 1.0).unwrap()
}

/// Magnitudes spread over [1e-8, 1e8] with either sign.
fn wide_scalar() -> impl Strategy<Value = f64> {
    (-8.0f64..8.0, any::<bool>(), 1.0f64..10.0).prop_map(|(e, neg, m)| {
        let v = m * 10f64.powf(e).min(1e8 / m);
        if neg {
            -v
        } else {
            v
        }
    })
}

#[test]
fn two_by_two_mask_has_rank_one() {
    let m = gen_rank_deficient(2, 2, &unit(), 1e4, &mut SeededRng::new(1)).unwrap();
    assert!(numerical_rank(&m) <= 1);
    assert!(m.max_abs() <= 1e4 * (1.0 + 1e-12));
}

#[test]
fn four_by_four_mask_is_rank_deficient() {
    let m = gen_rank_deficient(4, 4, &unit(), 1e4, &mut SeededRng::new(2)).unwrap();
    assert!(numerical_rank(&m) <= 3);
}

#[test]
fn one_row_mask_is_refused() {
    assert!(gen_rank_deficient(1, 4, &unit(), 1e4, &mut SeededRng::new(3)).is_err());
}

#[test]
fn split_examples() {
    let p2 = SplitParams::with_rho(2).unwrap();
    let p3 = SplitParams::with_rho(3).unwrap();
    let mut rng = SeededRng::new(4);
    assert_eq!(split_scalar(0.0, &p2, &mut rng).unwrap().as_slice(), &[0.0, 0.0]);

    let s = split_scalar(6.0, &p2, &mut rng).unwrap();
    assert!(s.iter().all(|&x| x > 0.0));
    assert!((s.iter().sum::<f64>() - 6.0).abs() <= 4.0 * U * 6.0);

    let s = split_scalar(-2.5, &p3, &mut rng).unwrap();
    assert!(s.iter().all(|&x| x <= 0.0));
    assert!((s.iter().sum::<f64>() + 2.5).abs() <= 4.0 * U * 2.5);
}

#[test]
fn left_lift_of_known_splits() {
    let m = lift_left(&[Vector::new(vec![2.0, 4.0]).unwrap()]).unwrap();
    assert_eq!(m.as_slice(), &[2.0, 4.0, 2.0, 4.0]);

    let zero = ra2a(&Vector::zeros(2), &SplitParams::default(), &mut SeededRng::new(5)).unwrap();
    assert_eq!(zero.shape(), (2, 4));
    assert!(zero.as_slice().iter().all(|&x| x == 0.0));
}

#[test]
fn right_lift_of_known_splits() {
    let splits = [Vector::new(vec![1.0, 2.0]).unwrap()];
    for perm in [vec![0, 1], vec![1, 0]] {
        let m = lift_right(&splits, &[perm]).unwrap();
        let col: Vec<f64> = (0..4).map(|r| m.get(r, 0)).collect();
        let mut sorted = col.clone();
        sorted.sort_by(f64::total_cmp);
        assert_eq!(sorted, vec![1.0, 1.0, 2.0, 2.0]);
        // T is 2×2 row-major in the column; both of its columns sum to 3.
        assert_eq!(col[0] + col[2], 3.0);
        assert_eq!(col[1] + col[3], 3.0);
    }
    let zero = rb2b(&Vector::zeros(3), &SplitParams::default(), &mut SeededRng::new(6)).unwrap();
    assert!(zero.as_slice().iter().all(|&x| x == 0.0));
}

#[test]
fn diagonal_helpers() {
    assert_eq!(diag2v(&Matrix::identity(3)).unwrap().as_slice(), &[1.0, 1.0, 1.0]);
    let m = Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
    assert_eq!(diag2v(&m).unwrap().as_slice(), &[1.0, 4.0]);
    let one = v2diag(&Vector::new(vec![5.0]).unwrap(), &mut SeededRng::new(7)).unwrap();
    assert_eq!(one.as_slice(), &[5.0]);
}

#[test]
fn cs_masks_for_hadamard_shape() {
    let (a, b) = cs_preprocess(3, 4, 3, &MaskConfig::default(), &mut SeededRng::new(8)).unwrap();
    assert!(numerical_rank(&a.r_mask) <= 3);
    assert!(numerical_rank(&b.r_mask) <= 3);
    let st = a.r_mask.matmul(&b.r_mask).unwrap();
    let sum = a.r_share.add(&b.r_share).unwrap();
    for (x, y) in sum.as_slice().iter().zip(st.as_slice()) {
        assert!((x - y).abs() <= 4.0 * U * st.max_abs());
    }
    assert!(cs_preprocess(2, 1, 2, &MaskConfig::default(), &mut SeededRng::new(9)).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn splits_sum_back(a in wide_scalar(), rho in 2usize..6, seed in any::<u64>()) {
        let p = SplitParams::with_rho(rho).unwrap();
        let s = split_scalar(a, &p, &mut SeededRng::new(seed)).unwrap();
        prop_assert_eq!(s.len(), rho);
        prop_assert!(s.iter().all(|x| x.signum() == a.signum()));
        let sum: f64 = s.iter().sum();
        prop_assert!(((sum - a) / a).abs() <= 4.0 * U, "sum {} vs {}", sum, a);
    }

    #[test]
    fn range_expanded_splits_sum_back(a in wide_scalar(), seed in any::<u64>()) {
        let p = SplitParams::new(2, SplitMode::RangeExpanded, 100.0).unwrap();
        let s = split_scalar(a, &p, &mut SeededRng::new(seed)).unwrap();
        // The residual split absorbs rounding at the scale of the θ-wide draws.
        prop_assert!((s.get(0) + s.get(1) - a).abs() <= 2.0 * U * 100.0 * a.abs());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn left_rows_sum_to_rho_times_a(xs in prop::collection::vec(wide_scalar(), 1..12), rho in 2usize..5, seed in any::<u64>()) {
        let a = Vector::new(xs).unwrap();
        let m = ra2a(&a, &SplitParams::with_rho(rho).unwrap(), &mut SeededRng::new(seed)).unwrap();
        for i in 0..a.len() {
            let sum: f64 = m.row(i).iter().sum();
            let want = rho as f64 * a.get(i);
            prop_assert!(((sum - want) / want).abs() <= 8.0 * U);
        }
    }

    #[test]
    fn latin_square_columns_sum_to_b(xs in prop::collection::vec(wide_scalar(), 1..12), rho in 2usize..6, seed in any::<u64>()) {
        let b = Vector::new(xs).unwrap();
        let m = rb2b(&b, &SplitParams::with_rho(rho).unwrap(), &mut SeededRng::new(seed)).unwrap();
        for i in 0..b.len() {
            for c in 0..rho {
                let sum: f64 = (0..rho).map(|k| m.get(k * rho + c, i)).sum();
                prop_assert!(((sum - b.get(i)) / b.get(i)).abs() <= 8.0 * U, "T_{} column {}", i, c);
            }
        }
    }

    #[test]
    fn lifted_product_diagonal_is_hadamard(pairs in prop::collection::vec((wide_scalar(), wide_scalar()), 1..10), seed in any::<u64>()) {
        let (xa, xb): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let (a, b) = (Vector::new(xa).unwrap(), Vector::new(xb).unwrap());
        let p = SplitParams::default();
        let mut rng = SeededRng::new(seed);
        let d = diag2v(&ra2a(&a, &p, &mut rng).unwrap().matmul(&rb2b(&b, &p, &mut rng).unwrap()).unwrap()).unwrap();
        for i in 0..a.len() {
            let want = a.get(i) * b.get(i);
            prop_assert!(((d.get(i) - want) / want).abs() <= 1.25 * 4.0 * U);
        }
    }

    #[test]
    fn masks_are_rank_deficient(n in 1usize..7, s in 2usize..9, m in 1usize..7, theta in 1.0f64..1e4, seed in any::<u64>()) {
        let cfg = MaskConfig::new(unit(), theta).unwrap();
        let (a, b) = cs_preprocess(n, s, m, &cfg, &mut SeededRng::new(seed)).unwrap();
        prop_assert!(numerical_rank(&a.r_mask) < s);
        prop_assert!(numerical_rank(&b.r_mask) < s);
        prop_assert!(a.r_mask.max_abs() <= theta * (1.0 + 1e-12));
        prop_assert!(b.r_mask.max_abs() <= theta * (1.0 + 1e-12));
        prop_assert_eq!(&a.st, &b.st);
    }

    #[test]
    fn diag_roundtrip(xs in prop::collection::vec(-1e12f64..1e12, 1..20), seed in any::<u64>()) {
        let v = Vector::new(xs).unwrap();
        let back = diag2v(&v2diag(&v, &mut SeededRng::new(seed)).unwrap()).unwrap();
        prop_assert_eq!(back.as_slice(), v.as_slice());
    }

    #[test]
    fn matrix_bytes_roundtrip(rows in 1usize..6, cols in 1usize..6, seed in any::<u64>()) {
        let mut rng = SeededRng::new(seed);
        let m = Matrix::from_fn(rows, cols, |_, _| rng.uniform(-1e300, 1e300));
        let bytes = m.to_bytes();
        prop_assert_eq!(bytes.len(), 8 + 8 * rows * cols);
        prop_assert_eq!(&bytes[..4], &(rows as u32).to_le_bytes());
        let back = Matrix::from_bytes(&bytes).unwrap();
        prop_assert_eq!(back.to_bytes(), bytes);
    }
}

#[test]
fn split_reconstruction_over_many_draws() {
    let mut rng = SeededRng::new(10);
    let p = SplitParams::default();
    let mut worst = 0f64;
    for _ in 0..100_000 {
        let a = rng.sign() * 10f64.powf(rng.uniform(-8.0, 8.0));
        let s = split_scalar(a, &p, &mut rng).unwrap();
        worst = worst.max(((s.iter().sum::<f64>() - a) / a).abs());
    }
    assert!(worst <= 4.0 * U, "worst relative error {worst:e}");
}
