//! Matrix functions against eigendecomposition and Jordan-block oracles.

mod common;

use common::matfun::{c, diagonalizable, eig_oracle_errors, jordan_errors, kinds};
use nepkit::linalg::dense::{norm_fro, CMat};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn eigendecomposition_oracle() {
    for (name, worst) in eig_oracle_errors(99, 100) {
        assert!(worst <= 1e-10, "{name}: worst relative error {worst:e}");
    }
}

#[test]
fn jordan_block_gives_derivative() {
    for (name, worst) in jordan_errors(5, 20) {
        assert!(worst <= 1e-12, "{name}: worst deviation {worst:e}");
    }
}

#[test]
fn derivative_matches_central_difference() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let h = 1e-5;
    for (name, f, sample) in kinds() {
        for _ in 0..20 {
            let z = sample(&mut rng);
            let fd = (f.eval(z + h).unwrap() - f.eval(z - h).unwrap()) / (2.0 * h);
            let d = f.eval_deriv(z).unwrap();
            assert!((fd - d).norm() <= 1e-7 * d.norm().max(1.0), "{name} at {z}: {d} vs {fd}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn one_by_one_matrix_is_scalar(re in 0.1f64..3.0, im in -2.0f64..2.0, which in 0usize..11) {
        let (_, f, _) = kinds().swap_remove(which);
        let z = c(re, im);
        let m = f.eval_matrix(&CMat::from_elem((1, 1), z)).unwrap();
        let s = f.eval(z).unwrap();
        prop_assert!((m[[0, 0]] - s).norm() <= 1e-13 * s.norm().max(1.0));
    }

    #[test]
    fn function_commutes_with_argument(seed in 0u64..10_000, which in 0usize..11) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (_, f, sample) = kinds().swap_remove(which);
        let (a, _, _) = diagonalizable(&mut rng, 4, sample);
        let fa = f.eval_matrix(&a).unwrap();
        let comm = fa.dot(&a) - a.dot(&fa);
        prop_assert!(norm_fro(&comm.view()) <= 1e-10 * norm_fro(&fa.view()) * norm_fro(&a.view()));
    }
}
