//! Minimal representatives and balanced sets.

use hdx_core::cochain::{inner_product, mean, norm_sq};
use hdx_core::generate::{complete, random_cochain, two_triangles};
use hdx_core::oriented::{
    balanced_check, coboundary, k_level_check, local_minimality_residuals, minimal_representative,
    minimality_certificate,
};
use hdx_core::{Cochain64, Complex64, Face, OrientedCochain};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn fixture(which: usize) -> Complex64 {
    match which {
        0 => complete(4, 2).unwrap(),
        1 => complete(5, 3).unwrap(),
        _ => two_triangles(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn minimal_representative_is_a_projection(seed in any::<u64>(), which in 0usize..3) {
        let x = fixture(which);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for k in 0..=x.top_dim() {
            let f = OrientedCochain::new(random_cochain(&x, k, &mut rng).unwrap());
            let m = minimal_representative(&x, &f).unwrap();
            let again = minimal_representative(&x, &m).unwrap();
            prop_assert!(again.cochain().sub(m.cochain()).unwrap().max_abs() < 1e-10);
            let removed = f.cochain().sub(m.cochain()).unwrap();
            prop_assert!(inner_product(&x, &removed, m.cochain()).unwrap().abs() < 1e-10);
            prop_assert!(minimality_certificate(&x, &m).unwrap() < 1e-10);
            prop_assert!(norm_sq(&x, m.cochain()).unwrap() <= norm_sq(&x, f.cochain()).unwrap() + 1e-12);
            if k >= 1 {
                let worst = local_minimality_residuals(&x, &m)
                    .unwrap()
                    .into_iter()
                    .fold(0.0f64, |a, (_, r)| a.max(r));
                prop_assert!(worst < 1e-10);
                prop_assert!((k_level_check(&x, &m).unwrap() - worst).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn shifting_by_a_partial_mean_reduces_norm(seed in any::<u64>()) {
        let x = fixture(0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_cochain(&x, 0, &mut rng).unwrap();
        let m = mean(&x, &f).unwrap();
        prop_assume!(m.abs() > 1e-3);
        let base = norm_sq(&x, &f).unwrap();
        for a in [m, 1.5 * m] {
            let shifted = Cochain64::new(&x, 0, f.values().add_scalar(-a)).unwrap();
            prop_assert!(norm_sq(&x, &shifted).unwrap() < base);
        }
        let min = minimal_representative(&x, &OrientedCochain::new(f.clone())).unwrap();
        prop_assert!((min.cochain().values() - f.values().add_scalar(-m)).amax() < 1e-12);
    }
}

#[test]
fn coboundaries_compose_to_zero() {
    for which in 0..3 {
        let x = fixture(which);
        for i in -1..=x.top_dim() - 2 {
            let dd = coboundary(&x, i + 1)
                .unwrap()
                .compose(&coboundary(&x, i).unwrap())
                .unwrap();
            assert_eq!(dd.matrix().amax(), 0.0);
        }
    }
}

#[test]
fn coboundaries_are_not_minimal() {
    let x = complete::<f64>(4, 2).unwrap();
    let g = Cochain64::from_vec(&x, 0, vec![0.0, 1.0, 3.0, -2.0]).unwrap();
    let f = coboundary(&x, 0).unwrap().apply(&g).unwrap();
    let m = minimal_representative(&x, &OrientedCochain::new(f)).unwrap();
    assert!(m.cochain().max_abs() < 1e-12);
}

#[test]
fn balanced_sets_on_c42() {
    let x = complete::<f64>(4, 2).unwrap();
    for matching in [[[0, 1], [2, 3]], [[0, 2], [1, 3]], [[0, 3], [1, 2]]] {
        let set: Vec<Face> = matching.iter().map(|e| Face::from(*e)).collect();
        let r = balanced_check(&x, &set, 0).unwrap();
        assert!(r.balanced(1e-12), "{r:?}");
        assert!(r.level_residual < 1e-10);
        assert!(r.centered_mean_residual < 1e-12);
    }
    let path = [Face::from([0, 1]), Face::from([1, 2])];
    assert!(!balanced_check(&x, &path, 0).unwrap().balanced(1e-6));
    let all: Vec<Face> = x.faces(1).unwrap().to_vec();
    for i in -1..=0 {
        assert!(balanced_check(&x, &all, i).unwrap().defect < 1e-12);
    }
    assert!(balanced_check(&x, &[Face::from([0, 1]), Face::from([0, 1, 2])], 0).is_err());
}
