//! Newton-type and interpolation solvers on the generated benchmarks.

use nepkit::interpol::{interpol_solve, InterpolOptions};
use nepkit::narnoldi::{narnoldi_solve, NArnoldiOptions};
use nepkit::nep::{EigenSolution, Region, Settings};
use nepkit::newton::{rii_solve, slp_solve, RiiOptions, SlpOptions};
use nepkit::problems::{gen_delay, gen_loaded_string, DelayParams, LoadedStringParams, Oracle};
use nepkit::C64;

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Worst relative distance from a computed eigenvalue to `want`.
fn worst_error(sol: &EigenSolution, want: &[C64]) -> f64 {
    sol.pairs
        .iter()
        .map(|p| want.iter().map(|w| (w - p.lambda).norm() / w.norm()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

fn distinct(sol: &EigenSolution, rel: f64) -> bool {
    let ev = sol.eigenvalues();
    (0..ev.len()).all(|i| (0..i).all(|j| (ev[i] - ev[j]).norm() > rel * ev[i].norm().max(ev[j].norm())))
}

fn delay() -> (nepkit::nep::NepOperator, Oracle) {
    let (op, oracle) = gen_delay(&DelayParams { n: 200, ..Default::default() }).unwrap();
    (op, oracle.unwrap())
}

fn string() -> (nepkit::nep::NepOperator, Oracle) {
    let (op, oracle) = gen_loaded_string(&LoadedStringParams { n: 100, ..Default::default() }).unwrap();
    (op, oracle.unwrap())
}

fn string_settings() -> Settings {
    Settings { nev: 9, tol: 1e-8, target: re(10.0), region: Some(Region::interval(4.0, 800.0).unwrap()), ..Default::default() }
}

fn check_delay(sol: &EigenSolution, oracle: &Oracle, s: &Settings, accuracy: f64) {
    assert!(sol.converged, "{:?}", sol.stats.warnings);
    assert_eq!(sol.len(), s.nev);
    assert!(sol.max_eta() <= s.tol);
    assert!(distinct(sol, 1e-3));
    let want = oracle.wanted(s.which, s.target, s.nev + 2);
    let err = worst_error(sol, &want);
    assert!(err <= accuracy, "eigenvalue error {err:e}");
}

#[test]
fn newton_solvers_on_delay() {
    let (op, oracle) = delay();
    let s = Settings { nev: 5, tol: 1e-12, target: re(1.0), ..Default::default() };
    check_delay(&slp_solve(&op, &s, &SlpOptions::default()).unwrap(), &oracle, &s, 1e-6);
    check_delay(&rii_solve(&op, &s, &RiiOptions::default()).unwrap(), &oracle, &s, 1e-6);
    let herm = RiiOptions { hermitian: true, ..Default::default() };
    check_delay(&rii_solve(&op, &s, &herm).unwrap(), &oracle, &s, 1e-6);
    check_delay(&narnoldi_solve(&op, &s, &NArnoldiOptions::default()).unwrap(), &oracle, &s, 1e-6);
}

#[test]
fn newton_solvers_on_loaded_string() {
    let (op, oracle) = string();
    let s = string_settings();
    let want = oracle.in_region(s.region.as_ref().unwrap());
    assert_eq!(want.len(), 9);
    let runs = [
        ("slp", slp_solve(&op, &s, &SlpOptions::default()).unwrap()),
        ("rii", rii_solve(&op, &s, &RiiOptions::default()).unwrap()),
        ("narnoldi", narnoldi_solve(&op, &s, &NArnoldiOptions::default()).unwrap()),
    ];
    for (name, sol) in runs {
        assert!(sol.converged, "{name}");
        assert_eq!(sol.len(), 9, "{name}");
        assert!(sol.max_eta() <= s.tol, "{name}");
        assert!(distinct(&sol, 1e-3), "{name}");
        let err = worst_error(&sol, &want);
        assert!(err <= 1e-5, "{name}: eigenvalue error {err:e}");
    }
}

#[test]
fn interpol_on_delay_interval() {
    let (op, oracle) = delay();
    let region = Region::interval(-100.0, 50.0).unwrap();
    let s = Settings { nev: 3, tol: 1e-13, target: re(1.0), region: Some(region.clone()), ..Default::default() };
    let sol = interpol_solve(&op, &s, &InterpolOptions::default()).unwrap();
    assert!(sol.converged, "{:?}", sol.stats.warnings);
    let want = oracle.in_region(&region);
    assert_eq!(sol.len(), want.len());
    let err = worst_error(&sol, &want);
    assert!(err <= 1e-9, "eigenvalue error {err:e}");
    assert_eq!(sol.stats.factorizations, 1);
}

#[test]
fn interpol_rejects_complex_regions() {
    let (op, _) = delay();
    let s = Settings { region: Some(Region::rectangle(-1.0, 1.0, -1.0, 1.0).unwrap()), ..Default::default() };
    assert!(interpol_solve(&op, &s, &InterpolOptions::default()).is_err());
    let s = Settings { region: None, ..s };
    assert!(interpol_solve(&op, &s, &InterpolOptions::default()).is_err());
}

#[test]
fn interpol_degree_limits_loaded_string_accuracy() {
    // the pole at 1 sits just outside [4, 800]; polynomial interpolation needs a high degree
    let (op, oracle) = string();
    let s = Settings { nev: 3, tol: 1e-6, ..string_settings() };
    let low = interpol_solve(&op, &s, &InterpolOptions { degree: Some(10) }).unwrap();
    let high = interpol_solve(&op, &s, &InterpolOptions { degree: Some(40) }).unwrap();
    let want = oracle.in_region(s.region.as_ref().unwrap());
    let (el, eh) = (worst_error(&low, &want), worst_error(&high, &want));
    assert!(!high.is_empty());
    assert!(low.is_empty() || eh < el, "degree 10: {el:e}, degree 40: {eh:e}");
}
