mod args;
mod report;

use args::{Cli, Command, LinSolverKind, OutputKind, ProblemArg, RunArgs, SolverKind};
use clap::Parser;
use nepkit::interpol::{interpol_solve, InterpolOptions, DEFAULT_DEGREE};
use nepkit::linalg::LinearSolver;
use nepkit::narnoldi::{narnoldi_solve, NArnoldiOptions};
use nepkit::nep::{EigenSolution, NepOperator, Region, Settings};
use nepkit::newton::{rii_solve, slp_solve, RiiOptions, SlpOptions};
use nepkit::nleigs::{nleigs_solve, NleigsOptions, Singularities};
use nepkit::problems::{gen_delay, gen_loaded_string, load_problem_manifest, DelayParams, LoadedStringParams};
use report::{Config, ProblemInfo, RunReport};
use serde_json::{json, Value};
use std::io::Write;

const EXIT_NOT_CONVERGED: i32 = 1;
const EXIT_USAGE: i32 = 2;

enum Failure {
    Usage(String),
    Solve(String),
}

fn usage<T>(msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure::Usage(msg.into()))
}

/// Flags that only make sense for some solvers or problems.
fn check_combinations(a: &RunArgs) -> Result<(), Failure> {
    let only = |set: bool, flag: &str, allowed: &[SolverKind]| -> Result<(), Failure> {
        if set && !allowed.contains(&a.solver) {
            let names: Vec<&str> = allowed.iter().map(|s| s.name()).collect();
            return usage(format!("{flag} is only valid with --solver {}", names.join("|")));
        }
        Ok(())
    };
    only(a.two_sided, "--two-sided", &[SolverKind::Nleigs])?;
    only(a.full_basis, "--full-basis", &[SolverKind::Nleigs])?;
    only(a.dd_tol.is_some(), "--dd-tol", &[SolverKind::Nleigs])?;
    only(a.dd_maxdeg.is_some(), "--dd-maxdeg", &[SolverKind::Nleigs])?;
    only(a.singularities.is_some(), "--singularities", &[SolverKind::Nleigs])?;
    only(a.hermitian, "--hermitian", &[SolverKind::Rii])?;
    only(a.lag.is_some(), "--lag", &[SolverKind::Rii])?;
    only(a.deflation_threshold.is_some(), "--deflation-threshold", &[SolverKind::Slp, SolverKind::Rii])?;
    only(a.degree.is_some(), "--degree", &[SolverKind::Interpol])?;
    if a.two_sided && !a.full_basis {
        return usage("--two-sided requires --full-basis");
    }
    let delay_only = a.tau.is_some() || a.b.is_some();
    let string_only = a.kappa.is_some() || a.mass.is_some();
    match a.problem {
        ProblemArg::Delay if string_only => usage("--kappa and --mass apply to loaded_string"),
        ProblemArg::LoadedString if delay_only => usage("--tau and --b apply to delay"),
        ProblemArg::Manifest(_) if delay_only || string_only || a.n.is_some() => {
            usage("problem parameters cannot be combined with a manifest")
        }
        _ => Ok(()),
    }
}

fn build_problem(a: &RunArgs) -> Result<(NepOperator, ProblemInfo, Settings), Failure> {
    let solve_err = |e: nepkit::NepError| Failure::Solve(e.to_string());
    match &a.problem {
        ProblemArg::Delay => {
            let d = DelayParams::default();
            let p = DelayParams { n: a.n.unwrap_or(d.n), tau: a.tau.unwrap_or(d.tau), b: a.b.unwrap_or(d.b), non_commuting: false };
            let (op, _) = gen_delay(&p).map_err(|e| Failure::Usage(e.to_string()))?;
            let info = ProblemInfo { name: "delay".into(), n: p.n, params: json!({ "tau": p.tau, "b": p.b }) };
            Ok((op, info, Settings::default()))
        }
        ProblemArg::LoadedString => {
            let d = LoadedStringParams::default();
            let p = LoadedStringParams { n: a.n.unwrap_or(d.n), kappa: a.kappa.unwrap_or(d.kappa), mass: a.mass.unwrap_or(d.mass) };
            let (op, _) = gen_loaded_string(&p).map_err(|e| Failure::Usage(e.to_string()))?;
            let info = ProblemInfo { name: "loaded_string".into(), n: p.n, params: json!({ "kappa": p.kappa, "mass": p.mass }) };
            Ok((op, info, Settings::default()))
        }
        ProblemArg::Manifest(path) => {
            let (op, settings) = load_problem_manifest(path).map_err(solve_err)?;
            let name = path.file_stem().map_or("manifest".into(), |s| s.to_string_lossy().into_owned());
            let info = ProblemInfo { name, n: op.dim(), params: json!({ "path": path.display().to_string() }) };
            Ok((op, info, settings))
        }
    }
}

fn resolve_settings(a: &RunArgs, mut s: Settings) -> Result<Settings, Failure> {
    if let Some(v) = a.nev {
        s.nev = v;
    }
    if a.ncv.is_some() {
        s.ncv = a.ncv;
    }
    if let Some(v) = a.tol {
        s.tol = v;
    }
    if a.max_it.is_some() {
        s.max_it = a.max_it;
    }
    if let Some(v) = a.target {
        s.target = v;
    }
    if a.region.is_some() {
        s.region = a.region.clone();
    }
    if let Some(v) = a.seed {
        s.seed = v;
    }
    if let Some(k) = a.linsolver {
        s.linear_solver = match k {
            LinSolverKind::Direct => LinearSolver::default(),
            LinSolverKind::Gmres => LinearSolver::gmres(),
            LinSolverKind::Bicgstab => LinearSolver::bicgstab(),
        };
    }
    s.two_sided = a.two_sided;
    s.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    match (a.solver, &s.region) {
        (SolverKind::Interpol, Some(Region::Interval { .. })) | (SolverKind::Nleigs, Some(_)) => Ok(s),
        (SolverKind::Interpol, _) => usage("interpol needs --region interval:a,b"),
        (SolverKind::Nleigs, None) => usage("nleigs needs --region"),
        _ => Ok(s),
    }
}

fn singularities_json(s: &Singularities) -> Value {
    match s {
        Singularities::Auto => json!("auto"),
        Singularities::None => json!("none"),
        Singularities::List(v) => json!(v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>()),
    }
}

fn solve(a: &RunArgs, op: &NepOperator, s: &Settings) -> (nepkit::Result<EigenSolution>, Value) {
    match a.solver {
        SolverKind::Slp => {
            let o = SlpOptions { deflation_threshold: a.deflation_threshold.unwrap_or(0.0), ..Default::default() };
            let v = json!({ "deflation_threshold": o.deflation_threshold });
            (slp_solve(op, s, &o), v)
        }
        SolverKind::Rii => {
            let d = RiiOptions::default();
            let o = RiiOptions {
                hermitian: a.hermitian,
                lag: a.lag.unwrap_or(d.lag),
                deflation_threshold: a.deflation_threshold.unwrap_or(d.deflation_threshold),
                ..d
            };
            let v = json!({ "hermitian": o.hermitian, "lag": o.lag, "deflation_threshold": o.deflation_threshold });
            (rii_solve(op, s, &o), v)
        }
        SolverKind::Narnoldi => (narnoldi_solve(op, s, &NArnoldiOptions::default()), json!({})),
        SolverKind::Interpol => {
            let o = InterpolOptions { degree: Some(a.degree.unwrap_or(DEFAULT_DEGREE)) };
            let v = json!({ "degree": o.degree });
            (interpol_solve(op, s, &o), v)
        }
        SolverKind::Nleigs => {
            let d = NleigsOptions::default();
            let o = NleigsOptions {
                singularities: a.singularities.clone().unwrap_or(d.singularities.clone()),
                full_basis: a.full_basis,
                dd_tol: a.dd_tol.unwrap_or(d.dd_tol),
                d_max: a.dd_maxdeg.unwrap_or(d.d_max),
                ..d
            };
            let v = json!({
                "singularities": singularities_json(&o.singularities),
                "full_basis": o.full_basis,
                "dd_tol": o.dd_tol,
                "dd_maxdeg": o.d_max,
                "boundary_points": o.boundary_points,
            });
            (nleigs_solve(op, s, &o), v)
        }
    }
}

fn run(a: &RunArgs) -> Result<i32, Failure> {
    check_combinations(a)?;
    let (op, info, base) = build_problem(a)?;
    let settings = resolve_settings(a, base)?;
    let (result, options) = solve(a, &op, &settings);
    let sol = result.map_err(|e| match e {
        nepkit::NepError::InvalidInput(m) | nepkit::NepError::Unsupported(m) => Failure::Usage(m),
        e => Failure::Solve(e.to_string()),
    })?;
    let (setup, total) = (sol.stats.setup_seconds, sol.stats.solve_seconds);
    let report = RunReport::new(a.solver.name(), info, Config { settings, options }, &sol, a.timings);
    let text = match a.output {
        OutputKind::Table => report.to_table(setup, total),
        OutputKind::Json => report.to_json() + "\n",
    };
    // a closed pipe is not an error worth reporting
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
    Ok(if sol.converged { 0 } else { EXIT_NOT_CONVERGED })
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            std::process::exit(e.exit_code());
        }
    };
    let code = match cli.command {
        Command::Run(a) => match run(&a) {
            Ok(c) => c,
            Err(Failure::Usage(m)) => {
                eprintln!("error: {m}");
                EXIT_USAGE
            }
            Err(Failure::Solve(m)) => {
                eprintln!("error: {m}");
                EXIT_NOT_CONVERGED
            }
        },
    };
    std::process::exit(code);
}
