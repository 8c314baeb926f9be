//! Leja–Bagby nodes and poles with the normalized rational Newton basis.

use crate::error::{NepError, Result};
use crate::linalg::dense::C64;

/// Nodes `σ_j`, poles `ξ_j` (`None` is infinity, `ξ_0` unused) and scalings `β_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct LejaBagby {
    pub nodes: Vec<C64>,
    pub poles: Vec<Option<C64>>,
    pub beta: Vec<f64>,
}

/// `log |1 − z/ξ|`, zero for an infinite pole.
fn log_pole_factor(z: C64, xi: Option<C64>) -> f64 {
    xi.map_or(0.0, |x| (1.0 - z / x).norm().ln())
}

fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if *x > v[best] {
            best = i;
        }
    }
    best
}

/// Greedy Leja–Bagby sequence of length `d_max + 1` over discretized sets.
///
/// `σ_0` is the boundary point nearest `start_hint`; then `σ_{j+1}` maximizes
/// and `ξ_{j+1}` minimizes `|s_j|` (in log form). A singularity is used at most
/// once; when none is left the pole is infinite.
pub fn leja_bagby(boundary: &[C64], singularities: &[C64], d_max: usize, start_hint: C64) -> Result<LejaBagby> {
    if boundary.is_empty() {
        return Err(NepError::InvalidInput("empty boundary discretization".into()));
    }
    if singularities.iter().any(|x| x.norm() == 0.0 || !x.re.is_finite() || !x.im.is_finite()) {
        return Err(NepError::InvalidInput("singularities must be finite and nonzero".into()));
    }
    let s0 = boundary[(0..boundary.len())
        .min_by(|&a, &b| (boundary[a] - start_hint).norm().total_cmp(&(boundary[b] - start_hint).norm()))
        .expect("nonempty")];
    let mut nodes = vec![s0];
    let mut poles = vec![None];
    let mut beta = vec![1.0];
    // log |s_j| on both sets
    let mut ls_b: Vec<f64> = boundary.iter().map(|z| (z - s0).norm().ln()).collect();
    let mut ls_x: Vec<f64> = singularities.iter().map(|z| (z - s0).norm().ln()).collect();
    let mut used = vec![false; singularities.len()];
    // log |b_j| on the boundary
    let mut lb: Vec<f64> = vec![0.0; boundary.len()];
    for j in 1..=d_max {
        let k = argmax(&ls_b);
        if ls_b[k] == f64::NEG_INFINITY || ls_b[k].is_nan() {
            return Err(NepError::InvalidInput(format!("boundary discretization too coarse for {} nodes", j + 1)));
        }
        let sigma = boundary[k];
        let xi = (0..singularities.len())
            .filter(|&i| !used[i])
            .min_by(|&a, &b| ls_x[a].total_cmp(&ls_x[b]))
            .map(|i| {
                used[i] = true;
                singularities[i]
            });
        if let Some(x) = xi {
            if nodes.iter().chain(std::iter::once(&sigma)).any(|s| (s - x).norm() <= 1e-14 * x.norm()) {
                return Err(NepError::InvalidInput(format!("pole {x} coincides with a node")));
            }
        }
        // b_j = b_{j−1} (λ − σ_{j−1}) / (β_j (1 − λ/ξ_j))
        let prev = nodes[j - 1];
        let w: Vec<f64> = boundary.iter().zip(&lb).map(|(z, l)| l + (z - prev).norm().ln() - log_pole_factor(*z, xi)).collect();
        let m = w[argmax(&w)];
        if !m.is_finite() {
            return Err(NepError::InvalidInput(format!("degenerate basis function b_{j}")));
        }
        lb = w.iter().map(|v| v - m).collect();
        beta.push(m.exp());
        for (z, l) in boundary.iter().zip(ls_b.iter_mut()) {
            *l += (z - sigma).norm().ln() - log_pole_factor(*z, xi);
        }
        for (z, l) in singularities.iter().zip(ls_x.iter_mut()) {
            *l += (z - sigma).norm().ln() - log_pole_factor(*z, xi);
        }
        nodes.push(sigma);
        poles.push(xi);
    }
    Ok(LejaBagby { nodes, poles, beta })
}

impl LejaBagby {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `b_0(λ) … b_{len−1}(λ)` with `b_0 = 1/β_0`.
    pub fn basis(&self, lambda: C64) -> Vec<C64> {
        let mut b = Vec::with_capacity(self.len());
        b.push(C64::new(1.0 / self.beta[0], 0.0));
        for j in 1..self.len() {
            let den = self.beta[j] * self.poles[j].map_or(C64::new(1.0, 0.0), |x| 1.0 - lambda / x);
            b.push(b[j - 1] * (lambda - self.nodes[j - 1]) / den);
        }
        b
    }

    /// The first `d + 1` entries with an infinite last pole.
    pub fn truncated(&self, d: usize) -> LejaBagby {
        let mut out = LejaBagby {
            nodes: self.nodes[..=d].to_vec(),
            poles: self.poles[..=d].to_vec(),
            beta: self.beta[..=d].to_vec(),
        };
        out.poles[d] = None;
        out
    }
}
