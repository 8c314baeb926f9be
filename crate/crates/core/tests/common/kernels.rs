//! NLEIGS kernels against the explicit linearization on small random instances.

use nepkit::linalg::dense::{norm2, norm_inf, random_mat, random_vec, vdot, CMat, CVec, C64};
use nepkit::linalg::krylov::KrylovBasis;
use nepkit::linalg::lu::DenseLu;
use nepkit::linalg::{CsrMatrix, LinearSolver, PatternHint};
use nepkit::nep::NepOperator;
use nepkit::nleigs::{dense_pencil, leja_bagby, RationalInterpolant, ShiftInvert, ToarBasis};
use nepkit::scalarfn::ScalarFunction;
use ndarray::s;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Random split problem with a polynomial, an exponential and a rational term.
pub fn random_op(rng: &mut ChaCha8Rng, n: usize) -> NepOperator {
    let mut m = || CsrMatrix::from_dense(&random_mat(rng, n, n));
    NepOperator::split(
        vec![
            (m(), ScalarFunction::constant(re(1.0))),
            (m(), ScalarFunction::polynomial(vec![re(-1.0), re(0.0)])),
            (m(), ScalarFunction::exp().with_scale(re(-0.4), re(1.0))),
            (m(), ScalarFunction::rational(vec![re(1.0)], vec![re(1.0), re(-2.5)]).unwrap()),
        ],
        PatternHint::Different,
    )
    .unwrap()
}

pub fn unit_grid(m: usize) -> Vec<C64> {
    (0..m).map(|i| re(-1.0 + 2.0 * i as f64 / (m - 1) as f64)).collect()
}

/// Interpolant on `[−1, 1]` with the degree forced to `d`.
pub fn forced<'a>(op: &'a NepOperator, d: usize, poles: &[C64]) -> RationalInterpolant<'a> {
    let seq = leja_bagby(&unit_grid(300), poles, d, re(0.0)).unwrap();
    RationalInterpolant::build(op, &seq, 0.0, d).unwrap()
}

pub fn shifted_pencil(ri: &RationalInterpolant, sigma: C64) -> (CMat, CMat) {
    let (a, b) = dense_pencil(ri).unwrap();
    (&a - &b.mapv(|v| v * sigma), b)
}

/// `(𝒜 − σℬ)⁻¹ℬ`
pub fn dense_shift_invert(ri: &RationalInterpolant, sigma: C64) -> CMat {
    let (m, b) = shifted_pencil(ri, sigma);
    DenseLu::factor(&m.view()).unwrap().solve_mat(&b.view())
}

pub fn orth_defect(v: &[CVec]) -> f64 {
    let mut worst = 0.0f64;
    for (i, a) in v.iter().enumerate() {
        for (j, b) in v.iter().enumerate() {
            let want = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((vdot(&a.view(), &b.view()) - re(want)).norm());
        }
    }
    worst
}

/// A random instance with `n ≤ 8`, `d ≤ 4`, half of them with finite poles.
fn instance(rng: &mut ChaCha8Rng, trial: usize) -> (NepOperator, usize, Vec<C64>, C64) {
    let n = rng.gen_range(2..=8);
    let d = rng.gen_range(2..=4);
    let op = random_op(rng, n);
    let poles = if trial % 2 == 0 { vec![] } else { vec![re(2.5), re(-3.0)] };
    let sigma = C64::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.2..0.2));
    (op, d, poles, sigma)
}

#[derive(Debug, Default, Clone, Copy)]
pub struct ShiftInvertErrors {
    /// Relative to the dense `(𝒜 − σℬ)⁻¹ℬx`.
    pub apply: f64,
    /// Relative to the dense `((𝒜 − σℬ)⁻¹ℬ)^* x`.
    pub adjoint: f64,
    /// `|⟨𝒮x, y⟩ − ⟨x, 𝒮^*y⟩| / (‖𝒮x‖ ‖y‖)`
    pub inner: f64,
}

pub fn shift_invert_errors(seed: u64, trials: usize) -> ShiftInvertErrors {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut e = ShiftInvertErrors::default();
    for trial in 0..trials {
        let (op, d, poles, sigma) = instance(&mut rng, trial);
        let ri = forced(&op, d, &poles);
        let n = op.dim();
        let si = ShiftInvert::new(&ri, sigma, &LinearSolver::default()).unwrap();
        let s = dense_shift_invert(&ri, sigma);
        let x = random_vec(&mut rng, n * d);
        let y = random_vec(&mut rng, n * d);
        let sx = si.apply(&x).unwrap();
        let want = s.dot(&x);
        e.apply = e.apply.max(norm2(&(&sx - &want).view()) / norm2(&want.view()));
        let sy = si.apply_adjoint(&y).unwrap();
        let want = s.t().mapv(|v| v.conj()).dot(&y);
        e.adjoint = e.adjoint.max(norm2(&(&sy - &want).view()) / norm2(&want.view()));
        let l = vdot(&sx.view(), &y.view());
        let r = vdot(&x.view(), &sy.view());
        e.inner = e.inner.max((l - r).norm() / (norm2(&sx.view()) * norm2(&y.view())));
    }
    e
}

#[derive(Debug, Default, Clone, Copy)]
pub struct ToarErrors {
    /// `‖ℬV_k − (𝒜 − σℬ)V_{k+1}H̄_k‖∞ / ‖ℬ‖∞`
    pub arnoldi: f64,
    /// `‖U^*U − I‖` entrywise maximum.
    pub orth_u: f64,
    /// Same for the stacked coefficient vectors.
    pub orth_g: f64,
    /// An expansion reported a breakdown.
    pub breakdowns: usize,
}

/// Up to 6 TOAR steps per instance, from a start block of equal blocks.
pub fn toar_errors(seed: u64, trials: usize) -> ToarErrors {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut e = ToarErrors::default();
    for trial in 0..trials {
        let (op, d, poles, sigma) = instance(&mut rng, trial);
        let ri = forced(&op, d, &poles);
        let n = op.dim();
        let si = ShiftInvert::new(&ri, sigma, &LinearSolver::default()).unwrap();
        let v = random_vec(&mut rng, n);
        let start: CVec = (0..d).flat_map(|_| v.iter().copied()).collect();
        let mut toar = ToarBasis::new(&si, &start, trial as u64).unwrap();
        let k = (n * d - 1).min(6);
        let mut hbar = CMat::zeros((k + 1, k));
        for j in 0..k {
            let x = toar.expand().unwrap();
            if x.dependent {
                e.breakdowns += 1;
            }
            for (i, h) in x.h.iter().enumerate() {
                hbar[[i, j]] = *h;
            }
            hbar[[j + 1, j]] = re(x.beta);
        }
        e.orth_u = e.orth_u.max(orth_defect(&toar.u));
        e.orth_g = e.orth_g.max(orth_defect(&toar.g));
        let vk = CMat::from_shape_fn((n * d, k + 1), |(i, j)| toar.vector(j)[i]);
        let (m, b) = shifted_pencil(&ri, sigma);
        let r = b.dot(&vk.slice(s![.., 0..k])) - m.dot(&vk.dot(&hbar));
        e.arnoldi = e.arnoldi.max(norm_inf(&r.view()) / norm_inf(&b.view()));
    }
    e
}
