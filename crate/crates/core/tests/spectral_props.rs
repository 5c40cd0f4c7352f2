use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use statexfer::spectral::full_propagator;
use statexfer::{eigendecompose, Chain};

fn chain_strategy(max_n: usize) -> impl Strategy<Value = Chain> {
    (2..=max_n).prop_flat_map(|n| {
        (
            prop::collection::vec(-2.0..2.0f64, n - 1),
            prop::collection::vec(-2.0..2.0f64, n),
        )
            .prop_map(|(j, b)| Chain::new(j, b, "random").unwrap())
    })
}

fn field_free_strategy(max_n: usize) -> impl Strategy<Value = Chain> {
    (2..=max_n).prop_flat_map(|n| {
        prop::collection::vec(-2.0..2.0f64, n - 1)
            .prop_map(|j| Chain::field_free(j, "random").unwrap())
    })
}

fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn propagator_is_unitary(chain in chain_strategy(64), t in 0.0..100.0f64) {
        let u = full_propagator(&eigendecompose(&chain.single_excitation_matrix()).unwrap(), t);
        let n = chain.len();
        let defect = u.adjoint() * &u - DMatrix::<Complex64>::identity(n, n);
        prop_assert!(max_abs(&defect) <= 1e-9);
    }

    #[test]
    fn spectral_reconstruction(chain in chain_strategy(64)) {
        let h = chain.single_excitation_matrix();
        let eig = eigendecompose(&h).unwrap();
        let n = chain.len();
        let dense = h.to_dense();
        let scale = h.gershgorin_radius().max(1.0);
        for k in 1..n {
            prop_assert!(eig.values()[k - 1] <= eig.values()[k]);
        }
        for (r, row) in dense.iter().enumerate() {
            for (c, &entry) in row.iter().enumerate() {
                let rebuilt: f64 = (0..n).map(|k| eig.component(r, k) * eig.values()[k] * eig.component(c, k)).sum();
                prop_assert!((rebuilt - entry).abs() <= 1e-10 * scale);
                let gram: f64 = (0..n).map(|k| eig.component(r, k) * eig.component(c, k)).sum();
                let expect = if r == c { 1.0 } else { 0.0 };
                prop_assert!((gram - expect).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn field_free_reality_pattern(chain in field_free_strategy(40), t in 0.0..50.0f64) {
        let eig = eigendecompose(&chain.single_excitation_matrix()).unwrap();
        for site in 0..chain.len() {
            let a = eig.amplitude(0, site, t);
            // 1-based odd sites are even 0-based indices: those stay real
            if site % 2 == 0 {
                prop_assert!(a.im.abs() <= 1e-10);
            } else {
                prop_assert!(a.re.abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn time_additivity(chain in chain_strategy(40), t1 in 0.0..30.0f64, t2 in 0.0..30.0f64) {
        let eig = eigendecompose(&chain.single_excitation_matrix()).unwrap();
        let lhs = full_propagator(&eig, t1) * full_propagator(&eig, t2);
        let rhs = full_propagator(&eig, t1 + t2);
        prop_assert!(max_abs(&(lhs - rhs)) <= 1e-9);
    }

    #[test]
    fn partial_tracking_matches_full(chain in chain_strategy(30), t in 0.0..20.0f64) {
        let h = chain.single_excitation_matrix();
        let n = chain.len();
        let full = eigendecompose(&h).unwrap();
        let ends = statexfer::Eigensystem::for_sites(&h, &[0, n - 1]).unwrap();
        prop_assert!((full.amplitude(0, n - 1, t) - ends.amplitude(0, n - 1, t)).norm() <= 1e-10);
    }
}

#[test]
fn dense_oracle_agrees_on_spectrum() {
    let chain = Chain::new(
        vec![0.3, -1.2, 0.8, 1.9, 0.05],
        vec![0.5, -0.4, 0.0, 1.1, -0.9, 0.2],
        "c",
    )
    .unwrap();
    let h = chain.single_excitation_matrix();
    let dense = h.to_dense();
    let m = DMatrix::from_fn(6, 6, |r, c| dense[r][c]);
    let mut oracle: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    oracle.sort_by(f64::total_cmp);
    let ours = eigendecompose(&h).unwrap();
    for (a, b) in ours.values().iter().zip(&oracle) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn zero_couplings_still_converge() {
    let chain = Chain::new(
        vec![1.0, 0.0, 0.7, 0.0],
        vec![0.0, 0.1, 0.1, -0.3, 0.2],
        "split",
    )
    .unwrap();
    let eig = eigendecompose(&chain.single_excitation_matrix()).unwrap();
    let u = full_propagator(&eig, 7.3);
    // decoupled blocks never exchange amplitude
    assert!(u[(3, 0)].norm() < 1e-14);
    assert!(u[(4, 2)].norm() < 1e-14);
}
