//! NLEIGS: rational interpolation on Leja–Bagby points, a companion-type
//! linearization and shift-and-invert Krylov–Schur with a compact basis.

use crate::error::{NepError, Result};
use crate::linalg::dense::{normalize, random_vec, CVec, C64};
use crate::linalg::krylov::{krylov_schur, FullBasis, KsSettings};
use crate::nep::{EigenPair, EigenSolution, NepOperator, Region, Settings, ShiftInvertSelector, SolveStats};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

mod interpolant;
mod leja;
mod linearization;
mod singularities;
mod toar;

pub use interpolant::{DividedDifferences, RationalInterpolant};
pub use leja::{leja_bagby, LejaBagby};
pub use linearization::{dense_pencil, ShiftInvert};
pub use singularities::{auto_singularities, poly_roots};
pub use toar::ToarBasis;

pub const DEFAULT_DD_TOL: f64 = 1e-11;
pub const DEFAULT_D_MAX: usize = 30;
pub const DEFAULT_BOUNDARY_POINTS: usize = 1000;
pub const DEFAULT_MAX_RESTARTS: usize = 100;
/// Ritz values up to this far outside the region (relative to its size) are
/// still ranked first. Kept tight: the linearization has spurious eigenvalues
/// at the finite poles, which usually sit just outside the region.
const RANKING_MARGIN: f64 = 1e-6;
/// Returned eigenvalues farther than this outside the region are discarded.
const REGION_MARGIN: f64 = 1e-6;
/// Left and right eigenvalues closer than this (relative) are paired.
const MATCH_TOL: f64 = 1e-6;

/// Where the poles of the interpolant come from.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum Singularities {
    /// Poles of the rational terms, falling back to polynomial interpolation.
    #[default]
    Auto,
    None,
    List(Vec<C64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct NleigsOptions {
    pub singularities: Singularities,
    /// Only the first shift is used; the default is the target.
    pub rk_shifts: Vec<C64>,
    pub full_basis: bool,
    pub dd_tol: f64,
    pub d_max: usize,
    pub boundary_points: usize,
}

impl Default for NleigsOptions {
    fn default() -> Self {
        NleigsOptions {
            singularities: Singularities::Auto,
            rk_shifts: Vec::new(),
            full_basis: false,
            dd_tol: DEFAULT_DD_TOL,
            d_max: DEFAULT_D_MAX,
            boundary_points: DEFAULT_BOUNDARY_POINTS,
        }
    }
}

fn first_block(v: &CVec, n: usize) -> CVec {
    v.slice(ndarray::s![0..n]).to_owned()
}

/// Singularity set and any warnings produced while obtaining it.
pub fn resolve_singularities(op: &NepOperator, src: &Singularities) -> (Vec<C64>, Vec<String>) {
    let mut warnings = Vec::new();
    let list = match src {
        Singularities::None => Vec::new(),
        Singularities::List(v) => v.clone(),
        Singularities::Auto => match auto_singularities(op) {
            Ok(v) => v,
            Err(e) => {
                warnings.push(format!("{e}; using polynomial interpolation"));
                Vec::new()
            }
        },
    };
    if *src == Singularities::Auto && list.iter().any(|z| z.norm() == 0.0) {
        warnings.push("a singularity at 0 cannot be used as a pole and was dropped".into());
        return (list.into_iter().filter(|z| z.norm() != 0.0).collect(), warnings);
    }
    (list, warnings)
}

/// Builds the rational interpolant on the region boundary.
pub fn build_interpolant<'a>(
    op: &'a NepOperator,
    region: &Region,
    target: C64,
    opts: &NleigsOptions,
    warnings: &mut Vec<String>,
) -> Result<RationalInterpolant<'a>> {
    let (sing, w) = resolve_singularities(op, &opts.singularities);
    warnings.extend(w);
    let boundary = region.boundary_points(opts.boundary_points);
    let seq = leja_bagby(&boundary, &sing, opts.d_max, target)?;
    let ri = RationalInterpolant::build(op, &seq, opts.dd_tol, opts.d_max)?;
    if ri.hit_cap {
        warnings.push(format!(
            "divided differences did not reach the tolerance {:.1e}; using degree {}",
            opts.dd_tol,
            ri.degree()
        ));
    }
    Ok(ri)
}

/// NLEIGS with a single static shift.
pub fn nleigs_solve(op: &NepOperator, settings: &Settings, opts: &NleigsOptions) -> Result<EigenSolution> {
    settings.validate()?;
    let region = settings.region.as_ref().ok_or_else(|| NepError::InvalidInput("NLEIGS needs a region".into()))?;
    if settings.two_sided && !opts.full_basis {
        return Err(NepError::InvalidInput("the two-sided variant requires the full basis".into()));
    }
    let start = Instant::now();
    let mut stats = SolveStats::default();
    let shift = match opts.rk_shifts.as_slice() {
        [] => settings.target,
        [s] => *s,
        [s, ..] => {
            stats.warnings.push(format!("{} shifts given; only the first ({s}) is used", opts.rk_shifts.len()));
            *s
        }
    };
    let ri = build_interpolant(op, region, settings.target, opts, &mut stats.warnings)?;
    let si = ShiftInvert::new(&ri, shift, &settings.linear_solver)?;
    stats.factorizations = 1;
    stats.setup_seconds = start.elapsed().as_secs_f64();

    let (n, d) = (op.dim(), ri.degree());
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let v = random_vec(&mut rng, n);
    let v0: CVec = (0..d).flat_map(|_| v.iter().copied()).collect();
    let tol = settings.tol;
    let cfg = KsSettings { nev: settings.nev, ncv: settings.ncv(), max_restarts: settings.max_it_or(DEFAULT_MAX_RESTARTS) };
    let mut sel = ShiftInvertSelector {
        shift,
        map: |l: C64| l,
        target: settings.target,
        which: settings.which,
        region: Some((region, RANKING_MARGIN)),
        accept: |l: C64, y: &CVec, _est: f64| Ok(settings.error(op, l, &first_block(y, n))? <= tol),
    };
    let out = if opts.full_basis {
        let mut basis = FullBasis::new(|x: &CVec| si.apply(x), &v0, settings.seed ^ 0x5eed)?;
        krylov_schur(&mut basis, &mut sel, &cfg)?
    } else {
        let mut basis = ToarBasis::new(&si, &v0, settings.seed ^ 0x5eed)?;
        krylov_schur(&mut basis, &mut sel, &cfg)?
    };

    let mut pairs = Vec::new();
    for (theta, y) in &out.converged {
        let lambda = sel.eigenvalue(*theta).expect("accepted values are finite");
        if !region.contains_relaxed(lambda, REGION_MARGIN) {
            stats.warnings.push(format!("λ = {lambda} lies outside the region and was discarded"));
            continue;
        }
        let mut x = first_block(y, n);
        normalize(&mut x);
        let eta = op.backward_error(lambda, &x)?;
        pairs.push(EigenPair { lambda, x, y: None, eta, eta_left: None });
    }
    let mut left_ok = true;
    if settings.two_sided {
        let mut lsel = ShiftInvertSelector {
            shift: shift.conj(),
            map: |l: C64| l.conj(),
            target: settings.target,
            which: settings.which,
            region: Some((region, RANKING_MARGIN)),
            accept: |l: C64, v: &CVec, _est: f64| {
                let y = si.adjoint_head(v)?;
                Ok(op.left_backward_error(l, &y)? <= tol)
            },
        };
        let mut basis = FullBasis::new(|x: &CVec| si.apply_adjoint(x), &v0, settings.seed ^ 0x1eff)?;
        let lout = krylov_schur(&mut basis, &mut lsel, &cfg)?;
        stats.restarts += lout.restarts;
        let left: Vec<(C64, &CVec)> =
            lout.converged.iter().filter_map(|(t, v)| lsel.eigenvalue(*t).map(|l| (l, v))).collect();
        for p in &mut pairs {
            let near = left
                .iter()
                .min_by(|a, b| (a.0 - p.lambda).norm().total_cmp(&(b.0 - p.lambda).norm()))
                .filter(|(l, _)| (l - p.lambda).norm() <= MATCH_TOL * p.lambda.norm().max(1.0));
            match near {
                Some((_, v)) => {
                    let mut y = si.adjoint_head(v)?;
                    normalize(&mut y);
                    p.eta_left = Some(op.left_backward_error(p.lambda, &y)?);
                    p.y = Some(y);
                }
                None => {
                    left_ok = false;
                    stats.warnings.push(format!("no left eigenvector found for λ = {}", p.lambda));
                }
            }
        }
    }
    if out.exhausted {
        stats.warnings.push("the Krylov space was exhausted".into());
    }
    if pairs.len() < settings.nev {
        stats.warnings.push(format!("{} of {} eigenvalues found in the region", pairs.len(), settings.nev));
    }
    stats.restarts += out.restarts;
    stats.iterations = out.history.len();
    stats.linear_solves = si.solve_count();
    for (h, e) in out.history.iter().zip(&out.estimates) {
        let (l, r): (Vec<C64>, Vec<f64>) =
            h.iter().zip(e).filter_map(|(&t, &est)| sel.eigenvalue(t).map(|l| (l, est / t.norm()))).unzip();
        stats.history.push(l);
        stats.history_residuals.push(r);
    }
    stats.solve_seconds = start.elapsed().as_secs_f64();
    let converged = pairs.len() >= settings.nev && left_ok;
    Ok(EigenSolution { pairs, converged, stats })
}
