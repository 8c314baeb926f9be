//! Single-vector Newton-type solvers: successive linear problems and
//! residual inverse iteration, with deflation for several eigenpairs.

mod rii;
mod slp;

pub use rii::{rii_scalar_newton, rii_solve, RiiOptions};
pub use slp::{slp_solve, SlpOptions};

use crate::deflation::InvariantPair;
use crate::error::{NepError, Result};
use crate::linalg::dense::{normalize, random_vec, CVec, C64};
use crate::nep::{EigenPair, EigenSolution, NepOperator, Settings, SolveStats};
use crate::linalg::solver::Factorization;
use ndarray::{concatenate, s, Axis};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

/// Start vector of the extended problem for the `k`-th eigenpair: the user
/// vector (first pair only) or a seeded random vector, zero in the `t` block.
pub fn start_vector(n: usize, k: usize, seed: u64, user: Option<&CVec>) -> CVec {
    let mut x = match user {
        Some(v) if k == 0 && v.len() == n => v.clone(),
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(k as u64));
            random_vec(&mut rng, n)
        }
    };
    normalize(&mut x);
    concatenate![Axis(0), x, CVec::zeros(k)]
}

/// Start vector biased towards the eigenvectors nearest `σ` that are not yet
/// locked: `steps` rounds of inverse iteration with `T(σ)` on the complement
/// of `range(X)`. The extended solve is avoided on purpose: its smallest
/// singular directions belong to the deflated block, whose eigenvalues are
/// infinite.
pub fn warm_start(
    pair: &InvariantPair,
    fact: &Factorization,
    seed: u64,
    user: Option<&CVec>,
    steps: usize,
) -> Result<CVec> {
    let n = pair.n();
    let k = pair.k();
    let mut x = start_vector(n, k, seed, user).slice(s![0..n]).to_owned();
    if user.is_some() && k == 0 {
        return Ok(concatenate![Axis(0), x, CVec::zeros(k)]);
    }
    x = pair.project_out(&x)?;
    for _ in 0..steps {
        x = pair.project_out(&fact.solve(&x)?)?;
        if normalize(&mut x) == 0.0 {
            return Err(NepError::Breakdown("start vector vanished".into()));
        }
    }
    normalize(&mut x);
    Ok(concatenate![Axis(0), x, CVec::zeros(k)])
}

/// Relative slack (in units of the region size) when filtering by region.
pub const REGION_MARGIN: f64 = 1e-6;

/// Outcome of one deflated single-vector run.
pub struct Single {
    pub lambda: C64,
    pub x: CVec,
    pub t: CVec,
}

/// Repeats `single` on the extended problem until `nev` pairs are locked.
pub fn deflated_loop<F>(op: &NepOperator, settings: &Settings, mut single: F) -> Result<EigenSolution>
where
    F: FnMut(&InvariantPair, &mut SolveStats) -> Result<Single>,
{
    settings.validate()?;
    let start = Instant::now();
    let mut stats = SolveStats::default();
    let mut pair = InvariantPair::empty(op.dim());
    // pairs outside the region stay locked so they are not found again
    let mut outside = Vec::new();
    while pair.k() - outside.len() < settings.nev {
        let s = match single(&pair, &mut stats) {
            Ok(s) => s,
            Err(NepError::NoConvergence(msg)) if pair.k() > 0 => {
                stats.warnings.push(format!("eigenpair {}: {msg}", pair.k() + 1));
                break;
            }
            Err(e) => return Err(e),
        };
        if let Err(e) = pair.extend(op, s.lambda, &s.x, &s.t) {
            stats.warnings.push(format!("eigenpair {} could not be locked: {e}", pair.k() + 1));
            break;
        }
        if let Some(region) = &settings.region {
            if !region.contains_relaxed(s.lambda, REGION_MARGIN) {
                stats.warnings.push(format!("λ = {} lies outside the region", s.lambda));
                outside.push(pair.k() - 1);
                if outside.len() > settings.nev {
                    stats.warnings.push("too many eigenvalues outside the region".into());
                    break;
                }
            }
        }
    }
    let mut pairs = Vec::new();
    let mut all_ok = true;
    for (j, (lambda, x)) in pair.eigenpairs().into_iter().enumerate() {
        if outside.contains(&j) {
            continue;
        }
        let eta = op.backward_error(lambda, &x)?;
        all_ok &= settings.error(op, lambda, &x)? <= settings.tol;
        pairs.push(EigenPair { lambda, x, y: None, eta, eta_left: None });
    }
    pairs.sort_by(|a, b| {
        let ka = settings.which.key(a.lambda, settings.target);
        let kb = settings.which.key(b.lambda, settings.target);
        ka.total_cmp(&kb)
    });
    stats.solve_seconds = start.elapsed().as_secs_f64();
    let converged = pairs.len() >= settings.nev && all_ok;
    Ok(EigenSolution { pairs, converged, stats })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dense::norm2;

    #[test]
    fn start_vector_shape() {
        let v = start_vector(5, 2, 3, None);
        assert_eq!(v.len(), 7);
        assert!((norm2(&v.view()) - 1.0).abs() < 1e-14);
        assert_eq!(v[5], C64::new(0.0, 0.0));
        assert_eq!(v, start_vector(5, 2, 3, None));
    }
}
