use blockset::algebra::{Field, Mat};
use blockset::blocking::{is_affine_blocking, is_strong_blocking, lift_to_affine, projectivize, PointSet};
use blockset::codes::{
    blocking_from_code, code_from_points, distance_via_hyperplanes, is_minimal, is_trifferent, points_from_code,
    LinearCode, TrifferenceMode,
};
use blockset::geometry::{count_affine, n_q_formula, n_q_oracle, qbin, AffineSubspace};
use blockset::io;
use num_bigint::BigUint;
use proptest::prelude::*;

const QS: [u32; 8] = [2, 3, 4, 5, 7, 8, 9, 16];

fn field_and_elems() -> impl Strategy<Value = (u32, u8, u8, u8)> {
    prop::sample::select(QS.to_vec()).prop_flat_map(|q| (Just(q), 0..q as u8, 0..q as u8, 0..q as u8))
}

/// A q, a k and `n` vectors of length k over F_q.
fn vectors(qs: Vec<u32>, ks: std::ops::RangeInclusive<usize>, n: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = (u32, usize, Vec<Vec<u8>>)> {
    (prop::sample::select(qs), ks).prop_flat_map(move |(q, k)| {
        (Just(q), Just(k), prop::collection::vec(prop::collection::vec(0..q as u8, k), n.clone()))
    })
}

fn full_rank_code(q: u32, k: usize, cols: &[Vec<u8>]) -> Option<LinearCode> {
    let f = Field::new(q).unwrap();
    let g = Mat::from_columns(&f, k, cols).ok()?;
    (g.rank() == k).then(|| LinearCode::new(g).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, ..ProptestConfig::default() })]

    #[test]
    fn field_laws((q, a, b, c) in field_and_elems()) {
        let f = Field::new(q).unwrap();
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
        prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
        prop_assert_eq!(f.add(a, f.neg(a)), 0);
        prop_assert_eq!(f.sub(a, b), f.add(a, f.neg(b)));
        if a != 0 {
            prop_assert_eq!(f.mul(a, f.inv(a)), 1);
            prop_assert_eq!(f.pow(a, q as u64 - 1), 1);
        }
        prop_assert_eq!(f.pow(a, q as u64), a);
    }

    #[test]
    fn rank_nullity((q, k, rows) in vectors(vec![2, 3, 4, 5], 1..=5, 1..=5)) {
        let f = Field::new(q).unwrap();
        let m = Mat::from_rows(&f, k, &rows).unwrap();
        let kernel = m.kernel();
        prop_assert_eq!(m.rank() + kernel.len(), k);
        for v in &kernel {
            prop_assert!(m.mul_vec(v).iter().all(|&x| x == 0));
        }
        prop_assert_eq!(m.transpose().rank(), m.rank());
        let (r, pivots) = m.rref();
        prop_assert_eq!(pivots.len(), m.rank());
        prop_assert_eq!(r.rref().0, r);
    }

    #[test]
    fn affine_subspace_round_trip((q, k, dirs) in vectors(vec![2, 3, 5], 2..=4, 0..=3), seed in 0u8..30) {
        let f = Field::new(q).unwrap();
        let offset: Vec<u8> = (0..k).map(|i| (seed as usize + 7 * i) as u8 % q as u8).collect();
        let w = AffineSubspace::from_parametric(&f, &offset, &dirs).unwrap();
        let rank = blockset::algebra::rank_of(&f, &dirs);
        prop_assert_eq!(w.dim(), rank);
        prop_assert!(w.contains(&offset));
        let pts = w.points();
        prop_assert_eq!(pts.len() as u128, (q as u128).pow(rank as u32));
        prop_assert!(pts.iter().all(|p| w.contains(p)));
        let (o, d) = w.parametric();
        prop_assert_eq!(AffineSubspace::from_parametric(&f, &o, &d).unwrap(), w);
    }

    #[test]
    fn gaussian_binomial_identities(q in prop::sample::select(vec![2u32, 3, 4, 5, 7]), k in 0i64..10, s in 0i64..10) {
        prop_assert_eq!(qbin(k, s, q), qbin(k, k - s, q));
        if k >= 1 && s >= 1 {
            // Pascal: [k, s] = [k−1, s−1] + q^s [k−1, s].
            let qs = BigUint::from(q).pow(s as u32);
            prop_assert_eq!(qbin(k, s, q), qbin(k - 1, s - 1, q) + qs * qbin(k - 1, s, q));
        }
        if 0 <= s && s <= k {
            prop_assert_eq!(count_affine(k, s, q), qbin(k, s, q) * BigUint::from(q).pow((k - s) as u32));
        }
    }

    #[test]
    fn lift_equivalence((q, k, pts) in vectors(vec![2, 3], 2..=4, 1..=12), s in 2usize..=3) {
        prop_assume!(s <= k);
        let f = Field::new(q).unwrap();
        let pts: Vec<Vec<u8>> = pts.into_iter().filter(|p| p.iter().any(|&x| x != 0)).collect();
        prop_assume!(!pts.is_empty());
        let l = PointSet::projective(&f, k, pts).unwrap();
        let strong = is_strong_blocking(&l, s - 1).unwrap().holds;
        let lifted = lift_to_affine(&l);
        prop_assert_eq!(strong, is_affine_blocking(&lifted, s).unwrap().holds);
        prop_assert_eq!(projectivize(&lifted), l);
    }

    #[test]
    fn distance_identity((q, k, cols) in vectors(vec![2, 3, 4, 5], 1..=3, 1..=7)) {
        prop_assume!(cols.iter().all(|c| c.iter().any(|&x| x != 0)));
        if let Some(c) = full_rank_code(q, k, &cols) {
            prop_assert_eq!(c.min_distance().unwrap(), distance_via_hyperplanes(&c).unwrap());
        }
    }

    #[test]
    fn ternary_trifferent_iff_minimal((_q, k, cols) in vectors(vec![3], 1..=3, 1..=7)) {
        prop_assume!(cols.iter().all(|c| c.iter().any(|&x| x != 0)));
        if let Some(c) = full_rank_code(3, k, &cols) {
            let direct = is_trifferent(&c, TrifferenceMode::Direct).unwrap().holds;
            prop_assert_eq!(direct, is_minimal(&c).unwrap().holds);
            prop_assert_eq!(direct, is_trifferent(&c, TrifferenceMode::Equivalence).unwrap().holds);
        }
    }

    #[test]
    fn minimal_iff_strong_blocking((q, k, cols) in vectors(vec![2, 3, 4], 2..=3, 2..=8)) {
        prop_assume!(cols.iter().all(|c| c.iter().any(|&x| x != 0)));
        if let Some(c) = full_rank_code(q, k, &cols) {
            let pts = points_from_code(&c).unwrap();
            prop_assert_eq!(is_minimal(&c).unwrap().holds, is_strong_blocking(&pts.set, 1).unwrap().holds);
            let back = code_from_points(&pts.set).unwrap();
            prop_assert_eq!(is_minimal(&back).unwrap().holds, is_minimal(&c).unwrap().holds);
        }
    }

    #[test]
    fn trifferent_iff_lift_blocks((_q, k, cols) in vectors(vec![3], 2..=3, 2..=7)) {
        prop_assume!(cols.iter().all(|c| c.iter().any(|&x| x != 0)));
        if let Some(c) = full_rank_code(3, k, &cols) {
            let s = blocking_from_code(&c).unwrap();
            let triff = is_trifferent(&c, TrifferenceMode::Direct).unwrap().holds;
            prop_assert_eq!(triff, is_affine_blocking(&s, 2).unwrap().holds);
        }
    }

    #[test]
    fn point_files_round_trip((q, k, pts) in vectors(vec![2, 3, 4, 5, 8], 1..=4, 0..=10)) {
        let f = Field::new(q).unwrap();
        let a = PointSet::affine(&f, k, pts).unwrap();
        prop_assert_eq!(io::parse_points(&io::write_points(&a)).unwrap(), a.clone());
        let nonzero: Vec<Vec<u8>> = a.points().iter().filter(|p| p.iter().any(|&x| x != 0)).cloned().collect();
        let p = PointSet::projective(&f, k, nonzero).unwrap();
        prop_assert_eq!(io::parse_points(&io::write_points(&p)).unwrap(), p);
    }

    #[test]
    fn matrix_files_round_trip((q, k, rows) in vectors(vec![2, 3, 4, 7, 32], 1..=5, 1..=4)) {
        let f = Field::new(q).unwrap();
        let m = Mat::from_rows(&f, k, &rows).unwrap();
        prop_assert_eq!(io::parse_matrix(&io::write_matrix(&m)).unwrap(), m);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, ..ProptestConfig::default() })]

    #[test]
    fn counting_oracle(q in prop::sample::select(vec![2u32, 3]), k in 2usize..=5, s in 2usize..=3) {
        prop_assume!(s <= k);
        let f = Field::new(q).unwrap();
        let oracle = n_q_oracle(&f, k, s, None).unwrap();
        prop_assert_eq!(BigUint::from(oracle), n_q_formula(k as i64, s as i64, q));
    }
}
