use clap::{Args, Parser, Subcommand, ValueEnum};
use nepkit::nep::Region;
use nepkit::nleigs::Singularities;
use nepkit::C64;
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "nepkit", version, about = "Sparse nonlinear eigenvalue solvers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve a problem and report eigenvalues and backward errors.
    Run(RunArgs),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProblemArg {
    Delay,
    LoadedString,
    Manifest(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolverKind {
    Slp,
    Rii,
    Narnoldi,
    Interpol,
    Nleigs,
}

impl SolverKind {
    pub fn name(&self) -> &'static str {
        match self {
            SolverKind::Slp => "slp",
            SolverKind::Rii => "rii",
            SolverKind::Narnoldi => "narnoldi",
            SolverKind::Interpol => "interpol",
            SolverKind::Nleigs => "nleigs",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LinSolverKind {
    Direct,
    Gmres,
    Bicgstab,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum OutputKind {
    #[default]
    Table,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// delay, loaded_string or manifest:PATH
    #[arg(long, value_parser = parse_problem)]
    pub problem: ProblemArg,
    /// Problem size (generated problems).
    #[arg(long)]
    pub n: Option<usize>,
    /// Delay τ.
    #[arg(long)]
    pub tau: Option<f64>,
    /// Coefficient of the delayed term.
    #[arg(long, allow_negative_numbers = true)]
    pub b: Option<f64>,
    /// Spring stiffness of the loaded string.
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Mass of the loaded string.
    #[arg(long)]
    pub mass: Option<f64>,

    #[arg(long, value_enum)]
    pub solver: SolverKind,
    #[arg(long)]
    pub nev: Option<usize>,
    #[arg(long)]
    pub ncv: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_it: Option<usize>,
    /// RE,IM or RE
    #[arg(long, value_parser = parse_target, allow_hyphen_values = true)]
    pub target: Option<C64>,
    /// interval:a,b | rect:a,b,c,d | ellipse:cx,cy,rx,ry
    #[arg(long, value_parser = parse_region)]
    pub region: Option<Region>,

    /// Also compute left eigenvectors (nleigs with --full-basis).
    #[arg(long)]
    pub two_sided: bool,
    /// Plain Arnoldi on the linearization instead of TOAR (nleigs).
    #[arg(long)]
    pub full_basis: bool,
    /// Hermitian scalar equation (rii).
    #[arg(long)]
    pub hermitian: bool,
    /// Refactorize every N iterations, 0 keeps the target (rii).
    #[arg(long)]
    pub lag: Option<usize>,
    /// Leave the deflated problem once η drops below X (slp, rii).
    #[arg(long)]
    pub deflation_threshold: Option<f64>,
    /// Chebyshev degree (interpol).
    #[arg(long)]
    pub degree: Option<usize>,
    /// Divided-difference stopping tolerance (nleigs).
    #[arg(long)]
    pub dd_tol: Option<f64>,
    /// Maximum interpolation degree (nleigs).
    #[arg(long)]
    pub dd_maxdeg: Option<usize>,
    /// auto, none or a list z1,z2,… (nleigs)
    #[arg(long, value_parser = parse_singularities, allow_hyphen_values = true)]
    pub singularities: Option<Singularities>,

    #[arg(long, value_enum)]
    pub linsolver: Option<LinSolverKind>,
    #[arg(long, value_enum, default_value_t)]
    pub output: OutputKind,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Include setup and solve times in JSON output.
    #[arg(long)]
    pub timings: bool,
}

fn parse_problem(s: &str) -> Result<ProblemArg, String> {
    match s {
        "delay" => Ok(ProblemArg::Delay),
        "loaded_string" => Ok(ProblemArg::LoadedString),
        _ => match s.strip_prefix("manifest:") {
            Some(p) if !p.is_empty() => Ok(ProblemArg::Manifest(PathBuf::from(p))),
            _ => Err(format!("unknown problem '{s}' (expected delay, loaded_string or manifest:PATH)")),
        },
    }
}

fn numbers(s: &str) -> Result<Vec<f64>, String> {
    s.split(',').map(|t| t.trim().parse::<f64>().map_err(|_| format!("'{t}' is not a number"))).collect()
}

fn parse_target(s: &str) -> Result<C64, String> {
    match numbers(s)?.as_slice() {
        [re] => Ok(C64::new(*re, 0.0)),
        [re, im] => Ok(C64::new(*re, *im)),
        _ => Err("expected RE or RE,IM".into()),
    }
}

fn parse_region(s: &str) -> Result<Region, String> {
    let (kind, rest) = s.split_once(':').ok_or("expected KIND:VALUES")?;
    let v = numbers(rest)?;
    let r = match (kind, v.as_slice()) {
        ("interval", [a, b]) => Region::interval(*a, *b),
        ("rect", [a, b, c, d]) => Region::rectangle(*a, *b, *c, *d),
        ("ellipse", [cx, cy, rx, ry]) => Region::ellipse(C64::new(*cx, *cy), *rx, *ry),
        ("interval" | "rect" | "ellipse", _) => return Err(format!("wrong number of values for {kind}")),
        _ => return Err(format!("unknown region kind '{kind}'")),
    };
    r.map_err(|e| e.to_string())
}

/// A real number or `a+bi`, `a-bi`, `bi`.
fn parse_complex_token(t: &str) -> Result<C64, String> {
    let bad = || format!("'{t}' is not a complex number");
    let t = t.trim();
    let Some(body) = t.strip_suffix('i') else {
        return t.parse::<f64>().map(|x| C64::new(x, 0.0)).map_err(|_| bad());
    };
    // split before the last sign that is not an exponent sign
    let bytes = body.as_bytes();
    let split = (1..bytes.len()).rev().find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let imag = |s: &str| match s {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        _ => s.parse::<f64>().map_err(|_| bad()),
    };
    match split {
        Some(k) => Ok(C64::new(body[..k].parse::<f64>().map_err(|_| bad())?, imag(&body[k..])?)),
        None => Ok(C64::new(0.0, imag(body)?)),
    }
}

fn parse_singularities(s: &str) -> Result<Singularities, String> {
    match s {
        "auto" => Ok(Singularities::Auto),
        "none" => Ok(Singularities::None),
        _ => s.split(',').map(parse_complex_token).collect::<Result<Vec<_>, _>>().map(Singularities::List),
    }
}
