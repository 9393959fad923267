//! Randomized identity sweeps behind `weakval verify`.
//!
//! Trial `t` in dimension `d` draws from ChaCha stream `d·2³² + t` of the run
//! seed: one scenario whose state (pure or Hilbert–Schmidt mixed) and
//! measurement (Haar basis or noisy POVM) cycle with `t`, and one pure state
//! measured in a Haar basis for the identities that need it.

use rayon::prelude::*;
use serde::Serialize;
use weakval_core::metrology::ZeroProbMode;
use weakval_core::quantum::{Measurement, QuantumState};
use weakval_core::random::{haar_pure_state, haar_unitary, hs_density_matrix, noisy_povm, random_hermitian, substream};

use crate::identities::{self, applicable_checks, pure_projective_checks, tolerance};
use crate::report::{sig6, CheckRecord};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Cell {
    pub dimension: usize,
    pub trials: usize,
    pub max_residual: f64,
    pub passed: bool,
    /// First failing trial, if any.
    pub first_failure: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityRow {
    pub identity: String,
    pub tolerance: f64,
    pub cells: Vec<Cell>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyMatrix {
    pub seed: u64,
    pub trials: usize,
    pub dimensions: Vec<usize>,
    pub rows: Vec<IdentityRow>,
    pub errors: Vec<String>,
    pub passed: bool,
}

impl VerifyMatrix {
    pub fn failing(&self) -> Vec<&str> {
        self.rows
            .iter()
            .filter(|r| r.cells.iter().any(|c| !c.passed))
            .map(|r| r.identity.as_str())
            .collect()
    }

    pub fn render(&self) -> String {
        let width = identities::ALL.iter().map(|s| s.len()).max().unwrap_or(0);
        let mut out = format!("{:<width$}", "identity");
        for d in &self.dimensions {
            out += &format!("  {:>16}", format!("d={d}"));
        }
        out.push('\n');
        for row in &self.rows {
            out += &format!("{:<width$}", row.identity);
            for c in &row.cells {
                let mark = if c.passed { "pass" } else { "FAIL" };
                out += &format!("  {:>16}", format!("{mark} {}", sig6(c.max_residual)));
            }
            out.push('\n');
        }
        out
    }
}

fn trial_checks(seed: u64, d: usize, t: usize) -> weakval_core::Result<Vec<CheckRecord>> {
    let mut rng = substream(seed, ((d as u64) << 32) + t as u64);
    let mixed = t % 2 == 1;
    let povm = (t / 2) % 2 == 1;
    let state = if mixed {
        QuantumState::Mixed(hs_density_matrix(d, 1 + t % d.max(1), &mut rng)?)
    } else {
        QuantumState::Pure(haar_pure_state(d, &mut rng))
    };
    let measurement = if povm {
        Measurement::Povm(noisy_povm(d, 0.2 + 0.7 * ((t % 5) as f64 / 4.0), &mut rng)?)
    } else {
        Measurement::Basis(haar_unitary(d, &mut rng))
    };
    let a = random_hermitian(d, &mut rng);
    let mut checks = applicable_checks(&state, &measurement, &a, ZeroProbMode::default_for(&state))?;
    if mixed || povm {
        let psi = QuantumState::Pure(haar_pure_state(d, &mut rng));
        let basis = Measurement::Basis(haar_unitary(d, &mut rng));
        let a = random_hermitian(d, &mut rng);
        checks.extend(pure_projective_checks(&psi, &basis, &a)?);
    }
    Ok(checks)
}

pub fn run_verify(seed: u64, trials: usize, dimensions: &[usize]) -> VerifyMatrix {
    let jobs: Vec<(usize, usize)> = dimensions.iter().flat_map(|&d| (0..trials).map(move |t| (d, t))).collect();
    let results: Vec<_> = jobs.par_iter().map(|&(d, t)| trial_checks(seed, d, t)).collect();

    let mut errors = Vec::new();
    let rows = identities::ALL
        .iter()
        .map(|&identity| {
            let cells = dimensions
                .iter()
                .map(|&d| {
                    let mut cell = Cell {
                        dimension: d,
                        trials: 0,
                        max_residual: 0.0,
                        passed: true,
                        first_failure: None,
                    };
                    for ((jd, t), result) in jobs.iter().zip(&results) {
                        if *jd != d {
                            continue;
                        }
                        let Ok(checks) = result else { continue };
                        for c in checks.iter().filter(|c| c.identity == identity) {
                            cell.trials += 1;
                            cell.max_residual = cell.max_residual.max(c.residual);
                            if !c.passed && cell.passed {
                                cell.passed = false;
                                cell.first_failure = Some(*t);
                            }
                        }
                    }
                    // an identity never exercised in a dimension is not a pass
                    if cell.trials == 0 {
                        cell.passed = false;
                    }
                    cell
                })
                .collect();
            IdentityRow {
                identity: identity.to_string(),
                tolerance: tolerance(identity),
                cells,
            }
        })
        .collect::<Vec<_>>();
    for ((d, t), result) in jobs.iter().zip(&results) {
        if let Err(e) = result {
            errors.push(format!("d={d} trial {t}: {e}"));
        }
    }
    let passed = errors.is_empty() && rows.iter().all(|r| r.cells.iter().all(|c| c.passed));
    VerifyMatrix {
        seed,
        trials,
        dimensions: dimensions.to_vec(),
        rows,
        errors,
        passed,
    }
}
