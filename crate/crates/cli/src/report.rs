//! Run report: aligned text table or JSON (see `schema/run_report.schema.json`).

use nepkit::nep::{EigenSolution, Settings};
use serde::Serialize;
use serde_json::Value;
use std::fmt::Write;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize)]
pub struct ProblemInfo {
    pub name: String,
    pub n: usize,
    /// Generator parameters, or the manifest path.
    pub params: Value,
}

#[derive(Debug, Serialize)]
pub struct Config {
    pub settings: Settings,
    /// Solver-specific options after defaults are applied.
    pub options: Value,
}

#[derive(Debug, Serialize)]
pub struct PairReport {
    pub lambda: [f64; 2],
    pub eta: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta_left: Option<f64>,
    /// Unit right eigenvector as `[re, im]` entries.
    pub x: Vec<[f64; 2]>,
}

#[derive(Debug, Serialize)]
pub struct Counters {
    pub iterations: usize,
    pub restarts: usize,
    pub linear_solves: usize,
    pub factorizations: usize,
}

#[derive(Debug, Serialize)]
pub struct Timings {
    pub setup_seconds: f64,
    pub total_seconds: f64,
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub solver: String,
    pub problem: ProblemInfo,
    pub config: Config,
    pub converged: bool,
    pub requested: usize,
    pub pairs: Vec<PairReport>,
    pub counters: Counters,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

impl RunReport {
    pub fn new(solver: &str, problem: ProblemInfo, config: Config, sol: &EigenSolution, timings: bool) -> Self {
        let s = &sol.stats;
        RunReport {
            schema_version: SCHEMA_VERSION,
            solver: solver.to_string(),
            requested: config.settings.nev,
            problem,
            config,
            converged: sol.converged,
            pairs: sol
                .pairs
                .iter()
                .map(|p| PairReport {
                    lambda: [p.lambda.re, p.lambda.im],
                    eta: p.eta,
                    eta_left: p.eta_left,
                    x: p.x.iter().map(|v| [v.re, v.im]).collect(),
                })
                .collect(),
            counters: Counters {
                iterations: s.iterations,
                restarts: s.restarts,
                linear_solves: s.linear_solves,
                factorizations: s.factorizations,
            },
            warnings: s.warnings.clone(),
            timings: timings.then(|| Timings { setup_seconds: s.setup_seconds, total_seconds: s.solve_seconds }),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Times are shown in the table even without `--timings`.
    pub fn to_table(&self, setup: f64, total: f64) -> String {
        let mut out = String::new();
        let two = self.pairs.iter().any(|p| p.eta_left.is_some());
        let _ = writeln!(out, "{} on {} (n = {})", self.solver, self.problem.name, self.problem.n);
        let _ = write!(out, "{:>4}  {:>22}  {:>22}  {:>10}", "k", "Re(λ)", "Im(λ)", "η(x,λ)");
        if two {
            let _ = write!(out, "  {:>10}", "η(y,λ)");
        }
        out.push('\n');
        for (k, p) in self.pairs.iter().enumerate() {
            let _ = write!(out, "{:>4}  {:>22.15e}  {:>22.15e}  {:>10.2e}", k + 1, p.lambda[0], p.lambda[1], p.eta);
            if let Some(l) = p.eta_left {
                let _ = write!(out, "  {l:>10.2e}");
            }
            out.push('\n');
        }
        let c = &self.counters;
        let _ = writeln!(
            out,
            "converged: {} ({} of {} requested)",
            if self.converged { "yes" } else { "no" },
            self.pairs.len(),
            self.requested
        );
        let _ = writeln!(
            out,
            "iterations {}  restarts {}  linear solves {}  factorizations {}",
            c.iterations, c.restarts, c.linear_solves, c.factorizations
        );
        let _ = writeln!(out, "setup {setup:.3}s  total {total:.3}s");
        for w in &self.warnings {
            let _ = writeln!(out, "warning: {w}");
        }
        out
    }
}
