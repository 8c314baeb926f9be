//! Dense extended-operator oracle built from the block definitions.

use nepkit::deflation::{ExtSolver, Extended, InvariantPair};
use nepkit::linalg::dense::{adjoint, eye, norm2, norm_fro, random_mat, random_vec, CMat, CVec, C64};
use nepkit::linalg::lu::{inverse, solve};
use nepkit::linalg::schur::dense_eig;
use nepkit::linalg::{CsrMatrix, LinearSolver, PatternHint};
use nepkit::nep::NepOperator;
use nepkit::scalarfn::ScalarFunction;
use ndarray::s;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::rc::Rc;

pub fn funcs() -> Vec<ScalarFunction> {
    vec![
        ScalarFunction::constant(C64::new(1.0, 0.0)),
        ScalarFunction::polynomial(vec![C64::new(-1.0, 0.0), C64::new(0.0, 0.0)]),
        ScalarFunction::exp().with_scale(C64::new(-0.5, 0.0), C64::new(1.0, 0.0)),
    ]
}

pub struct Problem {
    pub mats: Vec<CMat>,
    pub op: NepOperator,
}

pub fn random_problem(rng: &mut ChaCha8Rng, n: usize) -> Problem {
    let mut mats = vec![random_mat(rng, n, n), eye(n), random_mat(rng, n, n)];
    mats[0] = &mats[0] + &(eye(n) * C64::new(3.0, 0.0));
    let terms = mats.iter().zip(funcs()).map(|(m, f)| (CsrMatrix::from_dense(m), f)).collect();
    let op = NepOperator::split(terms, PatternHint::Different).unwrap();
    Problem { mats, op }
}

pub fn random_pair(rng: &mut ChaCha8Rng, n: usize, k: usize) -> (CMat, CMat) {
    let x = random_mat(rng, n, k);
    let mut h = CMat::zeros((k, k));
    for i in 0..k {
        h[[i, i]] = C64::new(i as f64 - 1.0 + rng.gen::<f64>() * 0.3, rng.gen::<f64>() - 0.5);
        for j in i + 1..k {
            h[[i, j]] = C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
        }
    }
    (x, h)
}

pub fn fd(f: &ScalarFunction, z: C64, deriv: bool) -> C64 {
    if deriv {
        f.eval_deriv(z).unwrap()
    } else {
        f.eval(z).unwrap()
    }
}

/// `[(f(λ) − f(H))(λI − H)⁻¹]` (or its λ-derivative) through an eigendecomposition of `H`.
pub fn phi_oracle(f: &ScalarFunction, h: &CMat, lambda: C64, deriv: bool) -> CMat {
    let k = h.nrows();
    let eig = dense_eig(&h.view()).unwrap();
    let mut v = CMat::zeros((k, k));
    let mut d = CMat::zeros((k, k));
    for (j, (mu, vec)) in eig.iter().enumerate() {
        v.column_mut(j).assign(vec);
        let (fl, fm) = (f.eval(lambda).unwrap(), f.eval(*mu).unwrap());
        d[[j, j]] = if deriv {
            (f.eval_deriv(lambda).unwrap() * (lambda - mu) - (fl - fm)) / ((lambda - mu) * (lambda - mu))
        } else {
            (fl - fm) / (lambda - mu)
        };
    }
    v.dot(&d).dot(&inverse(&v.view()).unwrap())
}

pub fn pow_c(z: C64, i: usize) -> C64 {
    (0..i).fold(C64::new(1.0, 0.0), |acc, _| acc * z)
}

pub fn dpow_c(z: C64, i: usize) -> C64 {
    if i == 0 {
        C64::new(0.0, 0.0)
    } else {
        pow_c(z, i - 1) * i as f64
    }
}

pub fn mat_pow(h: &CMat, i: usize) -> CMat {
    (0..i).fold(eye(h.nrows()), |acc, _| acc.dot(h))
}

/// The `(n+k)`-square extended matrix assembled from its block definitions.
pub fn dense_extended(p: &Problem, x: &CMat, h: &CMat, pidx: usize, lambda: C64, deriv: bool) -> CMat {
    let (n, k) = x.dim();
    let mut t = CMat::zeros((n + k, n + k));
    let mut tl = CMat::zeros((n, n));
    let mut u = CMat::zeros((n, k));
    for (a, f) in p.mats.iter().zip(funcs()) {
        tl = tl + a * fd(&f, lambda, deriv);
        u = u + a.dot(x).dot(&phi_oracle(&f, h, lambda, deriv));
    }
    let mut am = CMat::zeros((k, n));
    let mut bm = CMat::zeros((k, k));
    for i in 0..=pidx {
        let xhi = x.dot(&mat_pow(h, i));
        let c = if deriv { dpow_c(lambda, i) } else { pow_c(lambda, i) };
        am = am + adjoint(&xhi.view()) * c;
        if i >= 1 {
            let mut q = CMat::zeros((k, k));
            for j in 0..i {
                let c = if deriv { dpow_c(lambda, j) } else { pow_c(lambda, j) };
                q = q + mat_pow(h, i - 1 - j) * c;
            }
            bm = bm + adjoint(&xhi.view()).dot(x).dot(&q);
        }
    }
    t.slice_mut(s![0..n, 0..n]).assign(&tl);
    t.slice_mut(s![0..n, n..]).assign(&u);
    t.slice_mut(s![n.., 0..n]).assign(&am);
    t.slice_mut(s![n.., n..]).assign(&bm);
    t
}

pub fn rel(a: &CVec, b: &CVec) -> f64 {
    norm2(&(a - b).view()) / norm2(&b.view()).max(1e-300)
}

/// Worst relative errors of the implicit extended kernels.
#[derive(Debug, Default, Clone, Copy)]
pub struct ExtErrors {
    pub apply: f64,
    pub project: f64,
    pub solve: f64,
    pub solve_adjoint: f64,
    /// `p = 1` whenever `n ≥ k`, `p ≥ 2` otherwise.
    pub p_as_expected: bool,
}

impl ExtErrors {
    pub fn worst(&self) -> f64 {
        self.apply.max(self.project).max(self.solve).max(self.solve_adjoint)
    }
}

/// Random instances with `k ≤ 3`, `n ≤ 12`, ten per shape.
pub fn extended_errors(seed: u64) -> ExtErrors {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut e = ExtErrors { p_as_expected: true, ..Default::default() };
    for &(n, k) in &[(6, 1), (8, 2), (12, 3), (5, 3), (2, 3)] {
        for _ in 0..10 {
            let p = random_problem(&mut rng, n);
            let (x, h) = random_pair(&mut rng, n, k);
            let pair = InvariantPair::new(&p.op, x.clone(), h.clone()).unwrap();
            e.p_as_expected &= if n < k { pair.p() >= 2 } else { pair.p() == 1 };
            let ext = Extended::new(&p.op, &pair);
            let lambda = C64::new(rng.gen::<f64>() * 4.0 - 2.0, rng.gen::<f64>() + 2.0);
            let z = random_vec(&mut rng, n + k);
            for deriv in [false, true] {
                let dense = dense_extended(&p, &x, &h, pair.p(), lambda, deriv);
                e.apply = e.apply.max(rel(&ext.apply(lambda, &z, deriv).unwrap(), &dense.dot(&z)));

                // projection onto a random 4-column basis
                let v = random_mat(&mut rng, n + k, 4);
                let v1 = v.slice(s![0..n, ..]).to_owned();
                let tm = if deriv { p.op.assemble_deriv(lambda) } else { p.op.assemble(lambda) }.unwrap().to_dense();
                let first = adjoint(&v1.view()).dot(&tm).dot(&v1);
                let got = ext.project(&v, lambda, deriv, &first).unwrap();
                let want = adjoint(&v.view()).dot(&dense).dot(&v);
                e.project = e.project.max(norm_fro(&(&got - &want).view()) / norm_fro(&want.view()));
            }

            let sigma = C64::new(0.3, -1.5);
            let fact = Rc::new(LinearSolver::default().setup(p.op.assemble(sigma).unwrap()).unwrap());
            let es = ExtSolver::new(&p.op, &pair, sigma, fact).unwrap();
            let dense = dense_extended(&p, &x, &h, pair.p(), sigma, false);
            let b = random_vec(&mut rng, n + k);
            let want = solve(&dense.view(), &b.view()).unwrap();
            e.solve = e.solve.max(rel(&es.solve(&b).unwrap(), &want));
            let want = solve(&adjoint(&dense.view()).view(), &b.view()).unwrap();
            e.solve_adjoint = e.solve_adjoint.max(rel(&es.solve_adjoint(&b).unwrap(), &want));
        }
    }
    e
}
