//! Matrix-function kinds with samplers of admissible eigenvalues, and the
//! eigendecomposition and Jordan-block oracles.

use nepkit::linalg::dense::{eye, norm_fro, random_mat, CMat, C64};
use nepkit::linalg::lu::inverse;
use nepkit::scalarfn::{CombineOp, ScalarFunction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Functions under test, each with a sampler of admissible eigenvalues.
pub fn kinds() -> Vec<(&'static str, ScalarFunction, fn(&mut ChaCha8Rng) -> C64)> {
    fn anywhere(r: &mut ChaCha8Rng) -> C64 {
        c(r.gen_range(-2.0..2.0), r.gen_range(-2.0..2.0))
    }
    fn right_half(r: &mut ChaCha8Rng) -> C64 {
        c(r.gen_range(0.2..3.0), r.gen_range(-2.0..2.0))
    }
    fn off_pole(r: &mut ChaCha8Rng) -> C64 {
        c(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))
    }
    vec![
        ("polynomial", ScalarFunction::polynomial(vec![c(1.0, 0.5), c(-2.0, 0.0), c(0.3, 0.0), c(4.0, -1.0)]), anywhere),
        ("rational", ScalarFunction::rational(vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(1.0, 0.0), c(-3.0, 0.0)]).unwrap(), off_pole),
        ("exp", ScalarFunction::exp().with_scale(c(-0.7, 0.2), c(2.0, 0.0)), anywhere),
        ("log", ScalarFunction::log(), right_half),
        ("sqrt", ScalarFunction::sqrt(), right_half),
        ("invsqrt", ScalarFunction::invsqrt(), right_half),
        ("phi1", ScalarFunction::phi(1), anywhere),
        ("phi2", ScalarFunction::phi(2), anywhere),
        (
            "exp*rational",
            ScalarFunction::combine(
                CombineOp::Mul,
                ScalarFunction::exp(),
                ScalarFunction::rational(vec![c(1.0, 0.0)], vec![c(1.0, 0.0), c(5.0, 0.0)]).unwrap(),
            ),
            off_pole,
        ),
        ("exp+sqrt", ScalarFunction::combine(CombineOp::Add, ScalarFunction::exp(), ScalarFunction::sqrt()), right_half),
        (
            "exp(sqrt)",
            ScalarFunction::combine(CombineOp::Compose, ScalarFunction::exp(), ScalarFunction::sqrt()),
            right_half,
        ),
    ]
}

/// A random diagonalizable matrix `V D V⁻¹` with a moderately conditioned `V`.
pub fn diagonalizable(rng: &mut ChaCha8Rng, n: usize, sample: fn(&mut ChaCha8Rng) -> C64) -> (CMat, CMat, Vec<C64>) {
    let v = eye(n) + random_mat(rng, n, n) * c(0.25, 0.0);
    let d: Vec<C64> = (0..n).map(|_| sample(rng)).collect();
    let vinv = inverse(&v.view()).unwrap();
    let a = v.dot(&CMat::from_diag(&ndarray::Array1::from(d.clone()))).dot(&vinv);
    (a, v, d)
}

/// Worst relative error of `f(A)` against `V f(D) V⁻¹` over `trials` random
/// diagonalizable matrices of size 2 to 8, per kind.
pub fn eig_oracle_errors(seed: u64, trials: usize) -> Vec<(&'static str, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    kinds()
        .into_iter()
        .map(|(name, f, sample)| {
            let mut worst = 0.0f64;
            for _ in 0..trials {
                let n = rng.gen_range(2..=8);
                let (a, v, d) = diagonalizable(&mut rng, n, sample);
                let fd: Vec<C64> = d.iter().map(|&z| f.eval(z).unwrap()).collect();
                let want = v.dot(&CMat::from_diag(&ndarray::Array1::from(fd))).dot(&inverse(&v.view()).unwrap());
                let got = f.eval_matrix(&a).unwrap();
                worst = worst.max(norm_fro(&(&got - &want).view()) / norm_fro(&want.view()));
            }
            (name, worst)
        })
        .collect()
}

/// Worst deviation of `f([[z, 1], [0, z]])` from `[[f(z), f′(z)], [0, f(z)]]`,
/// relative to `max(|f(z)|, |f′(z)|, 1)`.
pub fn jordan_errors(seed: u64, trials: usize) -> Vec<(&'static str, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    kinds()
        .into_iter()
        .map(|(name, f, sample)| {
            let mut worst = 0.0f64;
            for _ in 0..trials {
                let z = sample(&mut rng);
                let j = CMat::from_shape_vec((2, 2), vec![z, c(1.0, 0.0), c(0.0, 0.0), z]).unwrap();
                let fj = f.eval_matrix(&j).unwrap();
                let (fz, dz) = (f.eval(z).unwrap(), f.eval_deriv(z).unwrap());
                let scale = fz.norm().max(dz.norm()).max(1.0);
                for (got, want) in [(fj[[0, 0]], fz), (fj[[1, 1]], fz), (fj[[0, 1]], dz), (fj[[1, 0]], c(0.0, 0.0))] {
                    worst = worst.max((got - want).norm() / scale);
                }
            }
            (name, worst)
        })
        .collect()
}
