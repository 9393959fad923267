//! Scenario documents: one state, one measurement, one generator per file.
//!
//! ```json
//! {
//!   "dimension": 2,
//!   "state": {"type": "pure", "data": [[0.7071067811865476, 0], [0.7071067811865476, 0]]},
//!   "measurement": {"type": "basis", "data": [[[1, 0], [0, 0]], [[0, 0], [1, 0]]]},
//!   "generator": [[[0.5, 0], [0, 0]], [[0, 0], [-0.5, 0]]],
//!   "phase": 0
//! }
//! ```
//!
//! Complex entries are `[re, im]`, matrices are lists of rows, a basis is a
//! list of vectors and a POVM a list of matrices.

use std::path::Path;

use serde::Deserialize;
use thiserror::Error;
use weakval_core::linalg::{c, CMatrix, CVector};
use weakval_core::quantum::{validate, HermitianOperator, Measurement, QuantumState, Scenario, Tolerances, ValidationReport};

type Entry = [f64; 2];
type Rows = Vec<Vec<Entry>>;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    dimension: usize,
    state: StateSpec,
    measurement: MeasurementSpec,
    generator: Rows,
    #[serde(default)]
    phase: f64,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "type", content = "data", rename_all = "lowercase")]
enum StateSpec {
    Pure(Vec<Entry>),
    Mixed(Rows),
}

#[derive(Debug, Deserialize)]
#[serde(tag = "type", content = "data", rename_all = "lowercase")]
enum MeasurementSpec {
    Basis(Rows),
    Povm(Vec<Rows>),
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("parse error at line {line}, column {column}, key `{key}`: {message}")]
    Parse {
        line: usize,
        column: usize,
        key: String,
        message: String,
    },
    #[error("validation error ({check}): residual {residual:e} exceeds tolerance {tolerance:e}")]
    Validation { check: String, residual: f64, tolerance: f64 },
    #[error("validation error (dimension): {what} has size {found}, expected {expected}")]
    Shape { what: String, expected: usize, found: usize },
}

impl ScenarioError {
    /// Name of the failed invariant for validation errors.
    pub fn check(&self) -> Option<&str> {
        match self {
            ScenarioError::Validation { check, .. } => Some(check),
            ScenarioError::Shape { .. } => Some("dimension"),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct LoadedScenario {
    pub scenario: Scenario,
    pub validation: ValidationReport,
}

fn vector(what: &str, entries: &[Entry], d: usize) -> Result<CVector, ScenarioError> {
    if entries.len() != d {
        return Err(ScenarioError::Shape {
            what: what.into(),
            expected: d,
            found: entries.len(),
        });
    }
    Ok(CVector::from_iterator(d, entries.iter().map(|[re, im]| c(*re, *im))))
}

fn matrix(what: &str, rows: &Rows, d: usize) -> Result<CMatrix, ScenarioError> {
    if rows.len() != d {
        return Err(ScenarioError::Shape {
            what: what.into(),
            expected: d,
            found: rows.len(),
        });
    }
    let mut m = CMatrix::zeros(d, d);
    for (r, row) in rows.iter().enumerate() {
        let row = vector(&format!("{what} row {r}"), row, d)?;
        m.set_row(r, &row.transpose());
    }
    Ok(m)
}

fn build(file: ScenarioFile) -> Result<Scenario, ScenarioError> {
    let d = file.dimension;
    if d == 0 {
        return Err(ScenarioError::Shape {
            what: "dimension".into(),
            expected: 1,
            found: 0,
        });
    }
    let state = match &file.state {
        StateSpec::Pure(v) => QuantumState::Pure(vector("state", v, d)?),
        StateSpec::Mixed(rows) => QuantumState::Mixed(matrix("state", rows, d)?),
    };
    let measurement = match &file.measurement {
        MeasurementSpec::Basis(vectors) => {
            if vectors.len() != d {
                return Err(ScenarioError::Shape {
                    what: "basis".into(),
                    expected: d,
                    found: vectors.len(),
                });
            }
            let cols = vectors
                .iter()
                .enumerate()
                .map(|(k, v)| vector(&format!("basis vector {k}"), v, d))
                .collect::<Result<Vec<_>, _>>()?;
            Measurement::basis_from_vectors(&cols)
        }
        MeasurementSpec::Povm(effects) => Measurement::Povm(
            effects
                .iter()
                .enumerate()
                .map(|(k, e)| matrix(&format!("effect {k}"), e, d))
                .collect::<Result<Vec<_>, _>>()?,
        ),
    };
    let generator = HermitianOperator::new_unchecked(matrix("generator", &file.generator, d)?);
    let mut scenario = Scenario::new(state, measurement, generator);
    scenario.phase = file.phase;
    Ok(scenario)
}

pub fn parse_scenario_str(text: &str) -> Result<LoadedScenario, ScenarioError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let file: ScenarioFile = serde_path_to_error::deserialize(de).map_err(|e| {
        let key = e.path().to_string();
        let inner = e.into_inner();
        ScenarioError::Parse {
            line: inner.line(),
            column: inner.column(),
            key,
            message: inner.to_string(),
        }
    })?;
    let scenario = build(file)?;
    let validation = validate(&scenario, &Tolerances::default()).map_err(|e| match e {
        weakval_core::Error::Dimension { what, expected, found } => ScenarioError::Shape {
            what: what.into(),
            expected,
            found,
        },
        other => ScenarioError::Validation {
            check: other.to_string(),
            residual: f64::NAN,
            tolerance: 0.0,
        },
    })?;
    if let Some(failed) = validation.first_failure() {
        return Err(ScenarioError::Validation {
            check: failed.name.to_string(),
            residual: failed.residual,
            tolerance: failed.tolerance,
        });
    }
    Ok(LoadedScenario { scenario, validation })
}

pub fn parse_scenario(path: &Path) -> Result<LoadedScenario, ScenarioError> {
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_scenario_str(&text)
}
