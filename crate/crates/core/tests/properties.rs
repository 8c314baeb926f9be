//! Randomized invariants of the dense kernels, regions, operators and file formats.

use nepkit::interpol::cheb_values;
use nepkit::linalg::dense::{adjoint, eye, norm2, norm_fro, random_mat, random_vec, vdot, CMat, CVec, C64};
use nepkit::linalg::lu::DenseLu;
use nepkit::linalg::orth::orthogonalize;
use nepkit::linalg::schur::schur;
use nepkit::linalg::{CsrMatrix, PatternHint};
use nepkit::nep::{NepOperator, Region};
use nepkit::problems::{read_matrix_market, write_matrix_market};
use nepkit::scalarfn::ScalarFunction;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random sparse matrix with roughly `density` of its entries set.
fn sparse(r: &mut ChaCha8Rng, n: usize, density: f64) -> CsrMatrix {
    let mut t = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if r.gen::<f64>() < density {
                t.push((i, j, C64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))));
            }
        }
    }
    CsrMatrix::from_triplets(n, n, &t).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn lu_solves_and_adjoint_solves(seed in 0u64..10_000, n in 1usize..12) {
        let mut r = rng(seed);
        let a = random_mat(&mut r, n, n) + eye(n) * C64::new(n as f64, 0.0);
        let b = random_vec(&mut r, n);
        let lu = DenseLu::factor(&a.view()).unwrap();
        let x = lu.solve(&b.view());
        prop_assert!(norm2(&(a.dot(&x) - &b).view()) <= 1e-12 * norm_fro(&a.view()) * norm2(&x.view()));
        let y = lu.solve_adjoint(&b.view());
        prop_assert!(norm2(&(adjoint(&a.view()).dot(&y) - &b).view()) <= 1e-12 * norm_fro(&a.view()) * norm2(&y.view()));
    }

    #[test]
    fn schur_form_is_unitary_and_triangular(seed in 0u64..10_000, n in 1usize..10) {
        let mut r = rng(seed);
        let a = random_mat(&mut r, n, n);
        let (t, z) = schur(&a.view()).unwrap();
        let zz = adjoint(&z.view()).dot(&z) - eye(n);
        prop_assert!(norm_fro(&zz.view()) <= 1e-12 * n as f64);
        let back = z.dot(&t).dot(&adjoint(&z.view())) - &a;
        prop_assert!(norm_fro(&back.view()) <= 1e-12 * norm_fro(&a.view()) * n as f64);
        for i in 0..n {
            for j in 0..i {
                prop_assert!(t[[i, j]].norm() <= 1e-14 * norm_fro(&a.view()));
            }
        }
    }

    #[test]
    fn gram_schmidt_leaves_an_orthogonal_remainder(seed in 0u64..10_000, n in 3usize..20, k in 1usize..3) {
        let mut r = rng(seed);
        let mut basis: Vec<CVec> = Vec::new();
        for _ in 0..k {
            let mut w = random_vec(&mut r, n);
            let o = orthogonalize(&basis, &mut w);
            w.mapv_inplace(|v| v / o.beta);
            basis.push(w);
        }
        let w0 = random_vec(&mut r, n);
        let mut w = w0.clone();
        let o = orthogonalize(&basis, &mut w);
        for q in &basis {
            prop_assert!(vdot(&q.view(), &w.view()).norm() <= 1e-13 * norm2(&w0.view()));
        }
        // w0 = Σ h_i q_i + w
        let mut rebuilt = w.clone();
        for (q, h) in basis.iter().zip(o.h.iter()) {
            rebuilt.scaled_add(*h, q);
        }
        prop_assert!(norm2(&(rebuilt - &w0).view()) <= 1e-13 * norm2(&w0.view()));
    }

    #[test]
    fn sparse_axpy_matches_dense(seed in 0u64..10_000, n in 1usize..15, alpha in -3.0f64..3.0) {
        let mut r = rng(seed);
        let a = sparse(&mut r, n, 0.3);
        let b = sparse(&mut r, n, 0.3);
        let s = a.axpy(C64::new(alpha, 0.5), &b, PatternHint::Different).unwrap();
        let want = a.to_dense() + b.to_dense() * C64::new(alpha, 0.5);
        prop_assert!(norm_fro(&(s.to_dense() - want).view()) <= 1e-14 * (1.0 + norm_fro(&a.to_dense().view())));
    }

    #[test]
    fn ellipse_boundary_satisfies_its_equation(cx in -5.0f64..5.0, cy in -5.0f64..5.0, rx in 0.1f64..10.0, ry in 0.1f64..10.0, m in 3usize..200) {
        let e = Region::ellipse(C64::new(cx, cy), rx, ry).unwrap();
        for z in e.boundary_points(m) {
            let v = ((z.re - cx) / rx).powi(2) + ((z.im - cy) / ry).powi(2);
            prop_assert!((v - 1.0).abs() <= 1e-12);
            prop_assert!(e.contains_relaxed(z, 1e-12));
        }
        prop_assert!(e.contains(C64::new(cx, cy)));
        prop_assert!(!e.contains(C64::new(cx + 1.01 * rx, cy)));
    }

    #[test]
    fn backward_error_ignores_vector_scaling(seed in 0u64..10_000, scale in 1e-3f64..1e3, re in -3.0f64..3.0, im in -1.0f64..1.0) {
        let mut r = rng(seed);
        let n = 6;
        let op = NepOperator::split(
            vec![
                (CsrMatrix::from_dense(&random_mat(&mut r, n, n)), ScalarFunction::constant(C64::new(1.0, 0.0))),
                (CsrMatrix::identity(n), ScalarFunction::exp()),
            ],
            PatternHint::Different,
        )
        .unwrap();
        let x = random_vec(&mut r, n);
        let l = C64::new(re, im);
        let a = op.backward_error(l, &x).unwrap();
        let b = op.backward_error(l, &x.mapv(|v| v * C64::new(scale, -scale))).unwrap();
        prop_assert!((a - b).abs() <= 1e-13 * a);
        prop_assert!(a <= 1.0 + 1e-12);
    }

    #[test]
    fn chebyshev_values_are_cosines(theta in 0.0f64..std::f64::consts::PI, d in 0usize..40) {
        let t = cheb_values(C64::new(theta.cos(), 0.0), d);
        for (k, v) in t.iter().enumerate() {
            prop_assert!((v.re - (k as f64 * theta).cos()).abs() <= 1e-12 * (1 + k) as f64);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn matrix_market_round_trip(seed in 0u64..10_000, n in 1usize..12) {
        let mut r = rng(seed);
        let a = sparse(&mut r, n, 0.4);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.mtx");
        write_matrix_market(&path, &a).unwrap();
        let b = read_matrix_market(&path).unwrap();
        prop_assert_eq!((b.nrows(), b.ncols()), (n, n));
        let diff: CMat = a.to_dense() - b.to_dense();
        prop_assert!(norm_fro(&diff.view()) == 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ellipse_distance_matches_dense_sampling(rx in 0.1f64..5.0, ry in 0.1f64..5.0, ang in 0.0f64..6.3, out in 1.01f64..4.0) {
        let e = Region::ellipse(C64::new(1.0, -2.0), rx, ry).unwrap();
        let z = C64::new(1.0 + out * rx * ang.cos(), -2.0 + out * ry * ang.sin());
        let sampled = e.boundary_points(200_000).iter().map(|p| (p - z).norm()).fold(f64::INFINITY, f64::min);
        let d = e.distance(z);
        // sampling overestimates by at most the chord sagitta
        prop_assert!(d <= sampled + 1e-12 && sampled - d <= 1e-8 * rx.max(ry));
    }
}
