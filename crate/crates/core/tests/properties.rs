use interpnn::curve::NeighborProfile;
use interpnn::weighting::ownn_rank;
use interpnn::{brute_knn, compute_weights, FittedModel, LabeledDataset, NeighborIndex, Task, WeightScheme};
use proptest::prelude::*;

fn instance(
    max_n: usize,
    max_d: usize,
    max_k: usize,
    allow_coarse: bool,
) -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<f64>, Vec<f64>, usize)> {
    (2..=max_n, 1..=max_d, any::<bool>().prop_map(move |c| c && allow_coarse)).prop_flat_map(move |(n, d, coarse)| {
        let coord = if coarse { (-3i32..=3).prop_map(f64::from).boxed() } else { (-10.0..10.0f64).boxed() };
        (
            prop::collection::vec(prop::collection::vec(coord.clone(), d), n),
            prop::collection::vec(-1.0..1.0f64, n),
            prop::collection::vec(coord, d),
            0..=max_k.min(n - 1),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn tree_matches_brute_force((pts, ys, q, k) in instance(500, 10, 50, true)) {
        let ds = LabeledDataset::new(pts, ys, Task::Regression).unwrap();
        let tree = NeighborIndex::build(&ds).unwrap().knn_query(&q, k).unwrap();
        prop_assert_eq!(tree, brute_knn(&ds, &q, k).unwrap());
    }

    #[test]
    fn all_k_curve_matches_single_fits((pts, ys, q, k) in instance(60, 4, 20, true), gamma in 0.0..6.0f64) {
        prop_assume!(k >= 1);
        let ds = LabeledDataset::new(pts, ys, Task::Regression).unwrap();
        let index = NeighborIndex::build(&ds).unwrap();
        let profile = NeighborProfile::new(&index.knn_query(&q, k).unwrap(), ds.labels());
        let mut curve = vec![0.0; k];
        let scheme = WeightScheme::Interpolated { gamma };
        profile.scores(&scheme, &mut curve);
        for j in 1..=k {
            let direct = FittedModel::fit(ds.clone(), scheme, j).unwrap().score(&q).unwrap();
            prop_assert!((curve[j - 1] - direct).abs() <= 1e-12, "k={} curve {} direct {}", j, curve[j - 1], direct);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn interpolated_weights_are_a_decreasing_distribution(
        (pts, ys, q, k) in instance(40, 5, 30, true),
        gamma in 0.0..50.0f64,
    ) {
        prop_assume!(k >= 1);
        let ds = LabeledDataset::new(pts, ys, Task::Regression).unwrap();
        let nl = brute_knn(&ds, &q, k).unwrap();
        let w = compute_weights(&WeightScheme::Interpolated { gamma }, &nl);
        prop_assert_eq!(w.len(), k);
        prop_assert!((w.sum() - 1.0).abs() <= 1e-12);
        prop_assert!(w.as_slice().iter().all(|&x| (0.0..=1.0).contains(&x)));
        prop_assert!(w.as_slice().windows(2).all(|p| p[0] >= p[1] - 1e-15));
    }

    #[test]
    fn weights_ignore_translation_and_scale(
        (pts, ys, q, k) in instance(40, 5, 30, false),
        gamma in 0.0..10.0f64,
        scale in 0.01..100.0f64,
        shift in -50.0..50.0f64,
    ) {
        prop_assume!(k >= 1);
        let moved = |p: &[f64]| p.iter().map(|x| x * scale + shift).collect::<Vec<f64>>();
        let ds = LabeledDataset::new(pts.clone(), ys.clone(), Task::Regression).unwrap();
        let ds2 = LabeledDataset::new(pts.iter().map(|p| moved(p)).collect(), ys, Task::Regression).unwrap();
        let (a, b) = (brute_knn(&ds, &q, k).unwrap(), brute_knn(&ds2, &moved(&q), k).unwrap());
        // rounding can reorder near-ties; compare only when the ranking survives
        prop_assume!(a.indices == b.indices);
        let scheme = WeightScheme::Interpolated { gamma };
        let (wa, wb) = (compute_weights(&scheme, &a), compute_weights(&scheme, &b));
        for (x, y) in wa.as_slice().iter().zip(wb.as_slice()) {
            prop_assert!((x - y).abs() <= 1e-9, "{} vs {}", x, y);
        }
    }

    #[test]
    fn gamma_zero_is_uniform((pts, ys, q, k) in instance(40, 5, 30, true)) {
        prop_assume!(k >= 1);
        let ds = LabeledDataset::new(pts, ys, Task::Regression).unwrap();
        let a = FittedModel::fit(ds.clone(), WeightScheme::Interpolated { gamma: 0.0 }, k).unwrap();
        let b = FittedModel::fit(ds, WeightScheme::Uniform, k).unwrap();
        prop_assert_eq!(a.score(&q).unwrap(), b.score(&q).unwrap());
    }

    #[test]
    fn prediction_stays_within_label_range((pts, ys, q, k) in instance(40, 5, 30, true), gamma in 0.0..20.0f64) {
        prop_assume!(k >= 1);
        let lo = ys.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = ys.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let ds = LabeledDataset::new(pts, ys, Task::Regression).unwrap();
        let p = FittedModel::fit(ds, WeightScheme::Interpolated { gamma }, k).unwrap().score(&q).unwrap();
        prop_assert!(p >= lo - 1e-12 && p <= hi + 1e-12);
    }

    #[test]
    fn ownn_weights_are_a_distribution(k in 1usize..400, d in 1usize..12) {
        let w = ownn_rank(k, d);
        prop_assert!((w.sum() - 1.0).abs() <= 1e-12);
        prop_assert!(w.as_slice().iter().all(|&x| x >= 0.0));
        prop_assert!(w.as_slice().windows(2).all(|p| p[0] >= p[1] - 1e-15));
    }
}
