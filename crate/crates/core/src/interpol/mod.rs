//! Chebyshev interpolation on a real interval followed by a colleague-type
//! linearization of the matrix polynomial, solved by shift-and-invert
//! Krylov–Schur.

use crate::error::{NepError, Result};
use crate::linalg::dense::{normalize, norm2, random_vec, CMat, CVec, C64, ONE, ZERO};
use crate::linalg::krylov::{krylov_schur, FullBasis, KsSettings};
use crate::linalg::lu::DenseLu;
use crate::linalg::schur::dense_eig;
use crate::linalg::sparse::{CsrMatrix, PatternHint};
use crate::nep::{EigenPair, EigenSolution, NepOperator, Region, Settings, ShiftInvertSelector, SolveStats};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::time::Instant;

pub const DEFAULT_DEGREE: usize = 20;
pub const DEFAULT_MAX_RESTARTS: usize = 100;
/// Computed eigenvalues may lie this far outside the interval (relative to its length).
pub const INTERVAL_MARGIN: f64 = 0.01;

/// `ν_i = cos((i + ½)π/(d+1))`, `i = 0..=d`.
pub fn cheb_nodes(d: usize) -> Vec<f64> {
    (0..=d).map(|i| ((i as f64 + 0.5) * PI / (d + 1) as f64).cos()).collect()
}

/// `τ_0(θ) … τ_d(θ)`
pub fn cheb_values(theta: C64, d: usize) -> Vec<C64> {
    let mut t = Vec::with_capacity(d + 1);
    t.push(ONE);
    if d >= 1 {
        t.push(theta);
    }
    for k in 2..=d {
        let next = 2.0 * theta * t[k - 1] - t[k - 2];
        t.push(next);
    }
    t
}

/// `Σ_k w_k M_k` over possibly different patterns.
pub(crate) fn sparse_sum(w: &[C64], mats: &[CsrMatrix]) -> Result<CsrMatrix> {
    let mut out = mats[0].zeros_like();
    for (wk, m) in w.iter().zip(mats) {
        if *wk != ZERO {
            out = out.axpy(*wk, m, PatternHint::Different)?;
        }
    }
    Ok(out)
}

/// `P_d(λ) = C₀/2 τ₀ + Σ_{k≥1} C_k τ_k` in the variable `θ ∈ [−1, 1]` mapped from `[a, b]`.
#[derive(Debug, Clone)]
pub struct ChebPoly {
    pub a: f64,
    pub b: f64,
    pub coeffs: Vec<CsrMatrix>,
    norms: Vec<f64>,
}

impl ChebPoly {
    pub fn new(a: f64, b: f64, coeffs: Vec<CsrMatrix>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(NepError::InvalidInput("polynomial without coefficients".into()));
        }
        if !(a < b) {
            return Err(NepError::InvalidInput(format!("interval [{a}, {b}] is degenerate")));
        }
        let norms = coeffs.iter().map(|c| c.norm_inf()).collect();
        Ok(ChebPoly { a, b, coeffs, norms })
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.coeffs[0].nrows()
    }

    pub fn to_unit(&self, lambda: C64) -> C64 {
        (2.0 * lambda - (self.a + self.b)) / (self.b - self.a)
    }

    pub fn from_unit(&self, theta: C64) -> C64 {
        theta * (0.5 * (self.b - self.a)) + 0.5 * (self.a + self.b)
    }

    /// Weights of the coefficient matrices at `λ` (`τ₀/2, τ₁, …`).
    pub fn weights(&self, lambda: C64) -> Vec<C64> {
        let mut w = cheb_values(self.to_unit(lambda), self.degree());
        w[0] *= 0.5;
        w
    }

    pub fn eval(&self, lambda: C64) -> Result<CsrMatrix> {
        sparse_sum(&self.weights(lambda), &self.coeffs)
    }

    pub fn apply(&self, lambda: C64, v: &CVec) -> CVec {
        let mut out = CVec::zeros(self.dim());
        for (w, c) in self.weights(lambda).into_iter().zip(&self.coeffs) {
            c.apply_add(w, &v.view(), &mut out);
        }
        out
    }

    /// `‖P(λ)x‖ / (Σ |w_k| ‖C_k‖∞ ‖x‖)`
    pub fn backward_error(&self, lambda: C64, x: &CVec) -> f64 {
        let scale: f64 = self.weights(lambda).iter().zip(&self.norms).map(|(w, n)| w.norm() * n).sum();
        norm2(&self.apply(lambda, x).view()) / (scale * norm2(&x.view()))
    }
}

/// Chebyshev coefficients of `T` on `[a, b]` from `d+1` samples.
pub fn cheb_coeffs(op: &NepOperator, a: f64, b: f64, d: usize) -> Result<ChebPoly> {
    let nodes = cheb_nodes(d);
    let lambdas: Vec<C64> = nodes.iter().map(|&nu| C64::new(0.5 * (b - a) * nu + 0.5 * (a + b), 0.0)).collect();
    // cos(k ω_i) weights, ω_i = (i + ½)π/(d+1)
    let w = |k: usize, i: usize| 2.0 / (d + 1) as f64 * (k as f64 * (i as f64 + 0.5) * PI / (d + 1) as f64).cos();
    let coeffs = if op.is_split() {
        let f: Vec<Vec<C64>> = lambdas.iter().map(|&l| op.coeffs(l)).collect::<Result<_>>()?;
        (0..=d)
            .map(|k| {
                let c: Vec<C64> = (0..op.num_terms()).map(|t| (0..=d).map(|i| f[i][t] * w(k, i)).sum()).collect();
                op.combine(&c)
            })
            .collect::<Result<Vec<_>>>()?
    } else {
        let samples: Vec<CsrMatrix> = lambdas.iter().map(|&l| op.assemble(l)).collect::<Result<_>>()?;
        (0..=d)
            .map(|k| {
                let wk: Vec<C64> = (0..=d).map(|i| C64::new(w(k, i), 0.0)).collect();
                sparse_sum(&wk, &samples)
            })
            .collect::<Result<Vec<_>>>()?
    };
    ChebPoly::new(a, b, coeffs)
}

/// Explicit colleague pencil `(A, B)` in the unit variable, acting on
/// `[τ₀x; …; τ_{d−1}x]`. Small problems only.
pub fn colleague_pencil(p: &ChebPoly) -> Result<(CMat, CMat)> {
    let d = p.degree();
    let n = p.dim();
    if d == 0 {
        return Err(NepError::InvalidInput("degree 0 has no eigenvalues".into()));
    }
    let dense: Vec<CMat> = p.coeffs.iter().map(|c| c.to_dense()).collect();
    let mut a = CMat::zeros((d * n, d * n));
    let mut bm = CMat::zeros((d * n, d * n));
    let blk = |m: &mut CMat, r: usize, c: usize, v: &CMat| {
        let mut s = m.slice_mut(ndarray::s![r * n..(r + 1) * n, c * n..(c + 1) * n]);
        s += v;
    };
    let id = crate::linalg::dense::eye(n);
    let last = d - 1;
    if d == 1 {
        blk(&mut a, 0, 0, &(&dense[0] * C64::new(-0.5, 0.0)));
        blk(&mut bm, 0, 0, &dense[1]);
        return Ok((a, bm));
    }
    blk(&mut a, 0, 1, &id);
    blk(&mut bm, 0, 0, &id);
    for k in 1..last {
        blk(&mut a, k, k - 1, &id);
        blk(&mut a, k, k + 1, &id);
        blk(&mut bm, k, k, &(&id * C64::new(2.0, 0.0)));
    }
    for k in 0..d {
        let ck = if k == 0 { &dense[0] * C64::new(0.5, 0.0) } else { dense[k].clone() };
        blk(&mut a, last, k, &(-ck));
    }
    blk(&mut a, last, d - 2, &dense[d]);
    blk(&mut bm, last, last, &(&dense[d] * C64::new(2.0, 0.0)));
    Ok((a, bm))
}

/// Eigenvalues of the explicit pencil, mapped to `[a, b]`, through a dense
/// eigensolve of `(A − sB)⁻¹B`. Infinite eigenvalues are dropped.
pub fn colleague_eigenvalues_dense(p: &ChebPoly, shift: C64) -> Result<Vec<C64>> {
    let (a, b) = colleague_pencil(p)?;
    let s = p.to_unit(shift);
    let lu = DenseLu::factor(&(&a - &(&b * s)).view())?;
    let m = lu.solve_mat(&b.view());
    let scale = crate::linalg::dense::norm_fro(&m.view()).max(1.0);
    Ok(dense_eig(&m.view())?
        .into_iter()
        .filter(|(t, _)| t.norm() > 1e-13 * scale)
        .map(|(t, _)| p.from_unit(s + 1.0 / t))
        .collect())
}

/// Shift-and-invert `(A − sB)⁻¹B` of the colleague pencil through one
/// factorization of `P(σ)` and the three-term recurrence.
pub struct ColleagueShiftInvert<'a> {
    p: &'a ChebPoly,
    s: C64,
    tau: Vec<C64>,
    fact: crate::linalg::solver::Factorization,
}

impl<'a> ColleagueShiftInvert<'a> {
    pub fn new(p: &'a ChebPoly, sigma: C64, solver: &crate::linalg::solver::LinearSolver) -> Result<Self> {
        if p.degree() == 0 {
            return Err(NepError::InvalidInput("degree 0 has no eigenvalues".into()));
        }
        let s = p.to_unit(sigma);
        let fact = solver.setup(p.eval(sigma)?)?;
        Ok(ColleagueShiftInvert { p, s, tau: cheb_values(s, p.degree()), fact })
    }

    pub fn solve_count(&self) -> usize {
        self.fact.solve_count()
    }

    pub fn apply(&self, v: &CVec) -> Result<CVec> {
        let d = self.p.degree();
        let n = self.p.dim();
        let c = &self.p.coeffs;
        let blk = |k: usize| v.slice(ndarray::s![k * n..(k + 1) * n]);
        let mut out = CVec::zeros(d * n);
        if d == 1 {
            let z0 = self.fact.solve(&c[1].apply(&blk(0)))?;
            out.assign(&(-z0));
            return Ok(out);
        }
        // r = B v
        let mut r: Vec<CVec> = (0..d - 1).map(|k| if k == 0 { blk(0).to_owned() } else { &blk(k) * C64::new(2.0, 0.0) }).collect();
        r.push(&c[d].apply(&blk(d - 1)) * C64::new(2.0, 0.0));
        // z_k = τ_k(s) z_0 + s_k
        let mut sk = vec![CVec::zeros(n), r[0].clone()];
        for k in 1..d - 1 {
            let next = &r[k] + &(&sk[k] * (2.0 * self.s)) - &sk[k - 1];
            sk.push(next);
        }
        let mut rhs = r[d - 1].clone();
        for k in 0..d {
            let w = if k == 0 { C64::new(0.5, 0.0) } else { ONE };
            c[k].apply_add(w, &sk[k].view(), &mut rhs);
        }
        c[d].apply_add(-ONE, &sk[d - 2].view(), &mut rhs);
        c[d].apply_add(2.0 * self.s, &sk[d - 1].view(), &mut rhs);
        let z0 = -self.fact.solve(&rhs)?;
        for k in 0..d {
            let mut zk = &z0 * self.tau[k];
            zk += &sk[k];
            out.slice_mut(ndarray::s![k * n..(k + 1) * n]).assign(&zk);
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Default)]
pub struct InterpolOptions {
    /// Interpolation degree (default 20).
    pub degree: Option<usize>,
}

pub fn interpol_solve(op: &NepOperator, settings: &Settings, opts: &InterpolOptions) -> Result<EigenSolution> {
    settings.validate()?;
    let region = settings.region.as_ref().ok_or_else(|| NepError::InvalidInput("interpolation needs an interval region".into()))?;
    let (a, b) = match region {
        Region::Interval { a, b } if a < b => (*a, *b),
        _ => return Err(NepError::InvalidInput("interpolation is restricted to a real interval region".into())),
    };
    let d = opts.degree.unwrap_or(DEFAULT_DEGREE);
    if d == 0 {
        return Err(NepError::InvalidInput("degree must be positive".into()));
    }
    let start = Instant::now();
    let mut stats = SolveStats::default();
    let poly = cheb_coeffs(op, a, b, d)?;
    let si = ColleagueShiftInvert::new(&poly, settings.target, &settings.linear_solver)?;
    stats.factorizations = 1;
    stats.setup_seconds = start.elapsed().as_secs_f64();

    let n = op.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let v0 = random_vec(&mut rng, n * d);
    let mut basis = FullBasis::new(|v: &CVec| si.apply(v), &v0, settings.seed ^ 0x5eed)?;
    let tol = settings.tol;
    let mut sel = ShiftInvertSelector {
        shift: si.s,
        map: |t: C64| poly.from_unit(t),
        target: settings.target,
        which: settings.which,
        region: Some((region, INTERVAL_MARGIN)),
        accept: |l: C64, y: &CVec, _est: f64| Ok(poly.backward_error(l, &y.slice(ndarray::s![0..n]).to_owned()) <= tol),
    };
    let cfg = KsSettings { nev: settings.nev, ncv: settings.ncv(), max_restarts: settings.max_it_or(DEFAULT_MAX_RESTARTS) };
    let out = krylov_schur(&mut basis, &mut sel, &cfg)?;

    let mut pairs = Vec::new();
    for (theta, y) in &out.converged {
        let lambda = sel.eigenvalue(*theta).expect("accepted values are finite");
        let mut x = y.slice(ndarray::s![0..n]).to_owned();
        normalize(&mut x);
        let eta = op.backward_error(lambda, &x)?;
        if eta > tol {
            stats.warnings.push(format!(
                "λ = {lambda}: η = {eta:.2e} against T exceeds the tolerance; the degree may be too small"
            ));
        }
        pairs.push(EigenPair { lambda, x, y: None, eta, eta_left: None });
    }
    if out.exhausted {
        stats.warnings.push("the Krylov space was exhausted".into());
    }
    if pairs.len() < settings.nev {
        stats.warnings.push(format!("{} of {} eigenvalues found in the interval", pairs.len(), settings.nev));
    }
    stats.restarts = out.restarts;
    stats.iterations = out.history.len();
    stats.linear_solves = si.solve_count();
    stats.history =
        out.history.iter().map(|h| h.iter().filter_map(|&t| sel.eigenvalue(t)).collect()).collect();
    stats.solve_seconds = start.elapsed().as_secs_f64();
    let converged = pairs.len() >= settings.nev;
    Ok(EigenSolution { pairs, converged, stats })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dense::{c, re};
    use crate::scalarfn::ScalarFunction;

    fn scalar(coeffs: &[f64]) -> ChebPoly {
        let m = coeffs.iter().map(|&v| CsrMatrix::from_dense(&CMat::from_elem((1, 1), re(v)))).collect();
        ChebPoly::new(-1.0, 1.0, m).unwrap()
    }

    #[test]
    fn nodes() {
        assert_eq!(cheb_nodes(0).len(), 1);
        assert!(cheb_nodes(0)[0].abs() < 1e-16);
        let n1 = cheb_nodes(1);
        assert!((n1[0] - 0.5f64.sqrt()).abs() < 1e-15 && (n1[1] + 0.5f64.sqrt()).abs() < 1e-15);
        let n2 = cheb_nodes(2);
        assert!((n2[0] - 0.866_025_403_784_438_6).abs() < 1e-15);
        assert!(n2[1].abs() < 1e-15);
        assert!((n2[2] + 0.866_025_403_784_438_6).abs() < 1e-15);
    }

    #[test]
    fn constant_and_linear_coefficients() {
        let m = CsrMatrix::from_dense(&ndarray::array![[re(1.0), re(2.0)], [re(0.0), re(-3.0)]]);
        let op = NepOperator::split(vec![(m.clone(), ScalarFunction::constant(ONE))], PatternHint::Same).unwrap();
        let p = cheb_coeffs(&op, -1.0, 1.0, 4).unwrap();
        assert!((p.coeffs[0].to_dense() - m.to_dense() * re(2.0)).iter().all(|v| v.norm() < 1e-14));
        for k in 1..=4 {
            assert!(p.coeffs[k].to_dense().iter().all(|v| v.norm() < 1e-14));
        }
        let op = NepOperator::split(vec![(m.clone(), ScalarFunction::polynomial(vec![ONE, ZERO]))], PatternHint::Same).unwrap();
        let p = cheb_coeffs(&op, -1.0, 1.0, 3).unwrap();
        assert!((p.coeffs[1].to_dense() - m.to_dense()).iter().all(|v| v.norm() < 1e-14));
        for k in [0, 2, 3] {
            assert!(p.coeffs[k].to_dense().iter().all(|v| v.norm() < 1e-14));
        }
    }

    #[test]
    fn interpolation_conditions() {
        let f = ScalarFunction::exp().with_scale(re(-0.3), ONE);
        let m = CsrMatrix::from_dense(&ndarray::array![[re(1.0), re(2.0)], [re(0.5), re(-3.0)]]);
        let op = NepOperator::split(
            vec![(CsrMatrix::identity(2), ScalarFunction::polynomial(vec![re(-1.0), ZERO])), (m, f)],
            PatternHint::Different,
        )
        .unwrap();
        let (a, b) = (-2.0, 5.0);
        let d = 7;
        let p = cheb_coeffs(&op, a, b, d).unwrap();
        for nu in cheb_nodes(d) {
            let l = re(0.5 * (b - a) * nu + 0.5 * (a + b));
            let diff = p.eval(l).unwrap().to_dense() - op.assemble(l).unwrap().to_dense();
            let scale = op.assemble(l).unwrap().norm_inf();
            assert!(diff.iter().map(|v| v.norm()).fold(0.0, f64::max) <= 1e-10 * scale);
        }
    }

    #[test]
    fn colleague_roots_of_chebyshev_polynomials() {
        let t2 = colleague_eigenvalues_dense(&scalar(&[0.0, 0.0, 1.0]), re(0.1)).unwrap();
        let mut r: Vec<f64> = t2.iter().map(|z| z.re).collect();
        r.sort_by(f64::total_cmp);
        assert!((r[0] + 0.5f64.sqrt()).abs() < 1e-13 && (r[1] - 0.5f64.sqrt()).abs() < 1e-13);
        let t1 = colleague_eigenvalues_dense(&scalar(&[0.0, 1.0]), re(0.1)).unwrap();
        assert_eq!(t1.len(), 1);
        assert!(t1[0].norm() < 1e-14);
    }

    #[test]
    fn shift_invert_matches_dense_pencil() {
        use crate::linalg::dense::random_mat;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for d in 1..=5 {
            let n = 3;
            let mats: Vec<CsrMatrix> = (0..=d).map(|_| CsrMatrix::from_dense(&random_mat(&mut rng, n, n))).collect();
            let p = ChebPoly::new(-3.0, 2.0, mats).unwrap();
            let sigma = c(0.3, 0.2);
            let si = ColleagueShiftInvert::new(&p, sigma, &Default::default()).unwrap();
            let (a, b) = colleague_pencil(&p).unwrap();
            let s = p.to_unit(sigma);
            let lu = DenseLu::factor(&(&a - &(&b * s)).view()).unwrap();
            let v = random_vec(&mut rng, n * d);
            let want = lu.solve(&b.dot(&v).view());
            let got = si.apply(&v).unwrap();
            assert!(norm2(&(&got - &want).view()) <= 1e-10 * norm2(&want.view()), "d = {d}");
        }
    }
}
