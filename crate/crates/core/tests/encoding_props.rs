use proptest::prelude::*;
use statexfer::encoding::{
    best_excitation_count, excitation_gain, fidelity_haselgrove, fidelity_multi, fidelity_single,
    leading_singular_value, optimal_encoding, transfer_matrix, SINGLE_EXCITATION_THRESHOLD,
};
use statexfer::{eigendecompose, Chain, TransferWindow};

fn chain_strategy() -> impl Strategy<Value = Chain> {
    (4usize..=30).prop_flat_map(|n| {
        (
            prop::collection::vec(-1.5..1.5f64, n - 1),
            prop::collection::vec(-1.0..1.0f64, n),
        )
            .prop_map(|(j, b)| Chain::new(j, b, "random").unwrap())
    })
}

fn descending(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn singular_values_bounded(chain in chain_strategy(), t in 0.0..40.0f64, w in 1usize..4) {
        let n = chain.len();
        let window = TransferWindow::ends(n, w.min(n / 2), w.min(n / 2), t).unwrap();
        let eig = eigendecompose(&chain.single_excitation_matrix()).unwrap();
        let solution = optimal_encoding(&transfer_matrix(&eig, &window).unwrap());
        prop_assert!(solution.singular_values.iter().all(|&l| (0.0..=1.0 + 1e-10).contains(&l)));
    }

    #[test]
    fn window_growth_never_hurts(chain in chain_strategy(), t in 0.0..40.0f64, w in 1usize..4) {
        let n = chain.len();
        let eig = eigendecompose(&chain.single_excitation_matrix()).unwrap();
        let w = w.min(n / 2 - 1).max(1);
        let small = leading_singular_value(&eig, &TransferWindow::ends(n, w, w, t).unwrap()).unwrap();
        let wider_in = leading_singular_value(&eig, &TransferWindow::ends(n, w + 1, w, t).unwrap()).unwrap();
        let wider_both = leading_singular_value(&eig, &TransferWindow::ends(n, w + 1, w + 1, t).unwrap()).unwrap();
        prop_assert!(wider_in >= small - 1e-12);
        prop_assert!(wider_both >= wider_in - 1e-12);
    }

    #[test]
    fn central_overlap_is_perfect_at_time_zero(chain in chain_strategy()) {
        let n = chain.len();
        let w = (n + 2) / 2;
        let window = TransferWindow::ends(n, w, w, 0.0).unwrap();
        let eig = eigendecompose(&chain.single_excitation_matrix()).unwrap();
        prop_assert!((leading_singular_value(&eig, &window).unwrap() - 1.0).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn enhancement_is_non_negative(ls in prop::collection::vec(0.0..=1.0f64, 1..10)) {
        prop_assert!(fidelity_multi(&ls).unwrap() >= fidelity_haselgrove(&ls).unwrap() - 1e-15);
    }

    #[test]
    fn single_excitation_optimal_above_threshold(
        l1 in SINGLE_EXCITATION_THRESHOLD..=1.0f64,
        rest in prop::collection::vec(0.0..=1.0f64, 0..9),
    ) {
        let mut ls = vec![l1];
        ls.extend(descending(rest.iter().map(|r| r * l1).collect()));
        let single = fidelity_single(l1).unwrap();
        for k in 1..=ls.len() {
            prop_assert!(single >= fidelity_multi(&ls[..k]).unwrap() - 1e-14);
        }
        prop_assert_eq!(best_excitation_count(&ls).unwrap().0, 1);
    }

    #[test]
    fn multi_nondecreasing_in_next_value(
        prefix in prop::collection::vec(0.0..=1.0f64, 1..6),
        a in 0.0..=1.0f64,
        b in 0.0..=1.0f64,
    ) {
        let prefix = descending(prefix);
        let last = *prefix.last().unwrap();
        let (lo, hi) = if a < b { (a * last, b * last) } else { (b * last, a * last) };
        let with = |x: f64| {
            let mut v = prefix.clone();
            v.push(x);
            fidelity_multi(&v).unwrap()
        };
        prop_assert!(with(hi) >= with(lo) - 1e-14);
    }

    #[test]
    fn gain_matches_difference(prefix in prop::collection::vec(0.0..=1.0f64, 1..6), next in 0.0..=1.0f64) {
        let mut extended = prefix.clone();
        extended.push(next);
        let diff = fidelity_multi(&extended).unwrap() - fidelity_multi(&prefix).unwrap();
        prop_assert!((excitation_gain(&prefix, next).unwrap() - diff).abs() < 1e-14);
    }
}

#[test]
fn optimal_encoding_achieves_singular_value() {
    let chain = Chain::new(
        vec![0.9, 1.1, 0.7, 1.3, 0.8, 1.0],
        vec![0.0, 0.2, -0.1, 0.0, 0.3, 0.1, 0.0],
        "c",
    )
    .unwrap();
    let eig = eigendecompose(&chain.single_excitation_matrix()).unwrap();
    let window = TransferWindow::ends(7, 3, 2, 2.7).unwrap();
    let m = transfer_matrix(&eig, &window).unwrap();
    let s = optimal_encoding(&m);
    for k in 0..s.singular_values.len() {
        let u = nalgebra::DVector::from_vec(s.input_vectors[k].clone());
        let image = &m.entries * u;
        assert!((image.norm() - s.singular_values[k]).abs() < 1e-12);
    }
}
