//! Split-form problems described by a JSON manifest next to Matrix Market files.
//!
//! ```json
//! {
//!   "name": "delay",
//!   "matrices": ["A1.mtx", "A2.mtx", "A3.mtx"],
//!   "functions": [{"type": "rational", "num": [-1, 0]}, {"type": "rational"}, {"type": "exp", "alpha": -0.001}],
//!   "pattern": "different",
//!   "settings": {"nev": 5, "tol": 1e-6, "target": [1, 0], "region": {"kind": "interval", "a": -100, "b": 50}}
//! }
//! ```
//!
//! Matrix paths are relative to the manifest's directory.

use super::mmio::{read_matrix_market, write_matrix_market};
use crate::error::{NepError, Result};
use crate::linalg::sparse::PatternHint;
use crate::nep::{NepOperator, Settings};
use crate::scalarfn::ScalarFunction;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::path::Path;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProblemManifest {
    pub name: String,
    pub matrices: Vec<String>,
    pub functions: Vec<Value>,
    #[serde(default)]
    pub pattern: PatternHint,
    #[serde(default)]
    pub settings: Settings,
}

pub fn load_problem_manifest(path: impl AsRef<Path>) -> Result<(NepOperator, Settings)> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    let m: ProblemManifest = serde_json::from_str(&text)?;
    if m.matrices.len() != m.functions.len() {
        return Err(NepError::Dimension(format!(
            "{} matrices but {} functions",
            m.matrices.len(),
            m.functions.len()
        )));
    }
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let mut terms = Vec::with_capacity(m.matrices.len());
    for (file, f) in m.matrices.iter().zip(&m.functions) {
        let a = read_matrix_market(dir.join(file))?;
        terms.push((a, ScalarFunction::from_json(f)?));
    }
    let op = NepOperator::split(terms, m.pattern)?;
    Ok((op, m.settings))
}

/// Writes `<dir>/<name>.json` plus one Matrix Market file per term.
pub fn write_problem_manifest(dir: impl AsRef<Path>, name: &str, op: &NepOperator, settings: &Settings) -> Result<()> {
    let dir = dir.as_ref();
    if !op.is_split() {
        return Err(NepError::Unsupported("only split operators can be written".into()));
    }
    std::fs::create_dir_all(dir)?;
    let mut matrices = Vec::new();
    for (i, a) in op.matrices().iter().enumerate() {
        let file = format!("{name}_A{}.mtx", i + 1);
        write_matrix_market(dir.join(&file), a)?;
        matrices.push(file);
    }
    let m = ProblemManifest {
        name: name.to_string(),
        matrices,
        functions: op.functions().iter().map(|f| f.to_json()).collect(),
        pattern: op.pattern_hint(),
        settings: settings.clone(),
    };
    std::fs::write(dir.join(format!("{name}.json")), serde_json::to_string_pretty(&m)?)?;
    Ok(())
}
