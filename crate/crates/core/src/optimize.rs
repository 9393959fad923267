//! Search over projective measurement bases for the one with the largest
//! Fisher information about phase shifts generated by `A`.
//!
//! Bases are moved by left multiplication with `exp(−iH(θ))`, `H(θ) = Σ θ_k G_k`
//! over an orthonormal basis `G_k` of the d² Hermitian matrices, so each step
//! is a local exponential chart at the current basis. Gradients are central
//! differences in `θ`; the objective is Fisher information with zero-probability
//! outcomes excluded, and the winner is re-scored with the limit correction for
//! pure states.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{c, unitary_exp, CMatrix, C64};
use crate::metrology::{fisher_information, ZeroProbMode};
use crate::quantum::{HermitianOperator, Measurement, QuantumState};
use crate::random::{haar_unitary, substream};
use crate::weak::{weak_value_profile, EPS_PROB};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OptimizeOptions {
    pub max_iters: usize,
    pub restarts: usize,
    /// Initial step length; grown on improvement, halved on a rejected step.
    pub step: f64,
    pub tol: f64,
    pub seed: u64,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        OptimizeOptions {
            max_iters: 2000,
            restarts: 5,
            step: 0.5,
            tol: 1e-10,
            seed: 0,
        }
    }
}

const FD_STEP: f64 = 1e-5;
const MIN_STEP: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OptimizationResult {
    #[serde(serialize_with = "crate::serialize::columns")]
    pub best_basis: CMatrix,
    pub best_fisher: f64,
    /// `4·Var(A)` in the input state; attainable for pure states.
    pub ceiling: f64,
    pub gap: f64,
    /// Accepted steps of the winning restart as `(iteration, objective)`.
    pub trace: Vec<(usize, f64)>,
    pub converged: bool,
    pub restart: usize,
    pub restart_objectives: Vec<f64>,
}

/// `⟨m|Aρ|m⟩` and `⟨m|ρ|m⟩` give the weak-value numerators and probabilities
/// of a basis in one pass each.
struct Objective {
    a_rho: CMatrix,
    rho: CMatrix,
}

impl Objective {
    fn new(state: &QuantumState, a: &HermitianOperator) -> Self {
        let rho = state.density_matrix();
        Objective {
            a_rho: a.matrix() * &rho,
            rho,
        }
    }

    fn fisher(&self, basis: &CMatrix) -> f64 {
        let mut total = 0.0;
        for m in 0..basis.ncols() {
            let b = basis.column(m);
            let p = b.dotc(&(&self.rho * b)).re;
            if p >= EPS_PROB {
                let num: C64 = b.dotc(&(&self.a_rho * b));
                total += num.im * num.im / p;
            }
        }
        4.0 * total
    }
}

/// Orthonormal (Hilbert–Schmidt) basis of the d×d Hermitian matrices.
fn hermitian_directions(d: usize) -> Vec<CMatrix> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(d * d);
    for j in 0..d {
        let mut m = CMatrix::zeros(d, d);
        m[(j, j)] = c(1.0, 0.0);
        out.push(m);
    }
    for j in 0..d {
        for k in j + 1..d {
            let mut sym = CMatrix::zeros(d, d);
            sym[(j, k)] = c(r, 0.0);
            sym[(k, j)] = c(r, 0.0);
            out.push(sym);
            let mut anti = CMatrix::zeros(d, d);
            anti[(j, k)] = c(0.0, r);
            anti[(k, j)] = c(0.0, -r);
            out.push(anti);
        }
    }
    out
}

/// Rephases each column so its largest-magnitude entry is real and positive.
pub fn gauge_fix(basis: &CMatrix) -> CMatrix {
    let mut out = basis.clone();
    for k in 0..out.ncols() {
        let mut best = 0;
        for r in 0..out.nrows() {
            // first-found on ties keeps the choice stable under round-off-free input
            if out[(r, k)].norm() > out[(best, k)].norm() + 1e-12 {
                best = r;
            }
        }
        let z = out[(best, k)];
        if z.norm() > 0.0 {
            let phase = z.conj() / z.norm();
            for r in 0..out.nrows() {
                out[(r, k)] *= phase;
            }
        }
    }
    out
}

struct Run {
    basis: CMatrix,
    objective: f64,
    trace: Vec<(usize, f64)>,
    converged: bool,
}

struct Ascent<'a> {
    objective: &'a Objective,
    directions: &'a [CMatrix],
    nudges: Vec<(CMatrix, CMatrix)>,
    ceiling: Option<f64>,
    options: OptimizeOptions,
}

impl Ascent<'_> {
    fn gradient(&self, basis: &CMatrix) -> Vec<f64> {
        self.nudges
            .iter()
            .map(|(up, down)| (self.objective.fisher(&(up * basis)) - self.objective.fisher(&(down * basis))) / (2.0 * FD_STEP))
            .collect()
    }

    fn is_done(&self, value: f64, grad_norm: f64) -> bool {
        grad_norm < self.options.tol || self.ceiling.is_some_and(|c| c - value < self.options.tol)
    }

    fn run(&self, start: CMatrix) -> Run {
        let mut basis = start;
        let mut value = self.objective.fisher(&basis);
        let mut trace = vec![(0, value)];
        let mut step = self.options.step;
        let mut converged = false;
        for iter in 1..=self.options.max_iters {
            let grad = self.gradient(&basis);
            let grad_norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
            if self.is_done(value, grad_norm) {
                converged = true;
                break;
            }
            let h = self
                .directions
                .iter()
                .zip(&grad)
                .fold(CMatrix::zeros(basis.nrows(), basis.ncols()), |acc, (g, w)| acc + g.scale(*w));
            let mut accepted = false;
            while step >= MIN_STEP {
                let candidate = unitary_exp(&h, step) * &basis;
                let next = self.objective.fisher(&candidate);
                if next > value {
                    basis = candidate;
                    value = next;
                    step *= 1.5;
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if !accepted {
                // no ascent direction at resolvable step lengths
                break;
            }
            trace.push((iter, value));
        }
        if !converged {
            let grad = self.gradient(&basis);
            converged = self.is_done(value, grad.iter().map(|g| g * g).sum::<f64>().sqrt());
        }
        Run {
            basis,
            objective: value,
            trace,
            converged,
        }
    }
}

/// Maximizes the Fisher information of a projective measurement over bases.
pub fn optimize_measurement(state: &QuantumState, a: &HermitianOperator, options: OptimizeOptions) -> Result<OptimizationResult> {
    let d = state.dim();
    if a.dim() != d {
        return Err(Error::Dimension {
            what: "generator",
            expected: d,
            found: a.dim(),
        });
    }
    if options.restarts == 0 {
        return Err(Error::Parameter("restarts must be at least 1".into()));
    }
    let mean = state.expectation(a.matrix());
    let ceiling = 4.0 * state.centered_second_moment(a.matrix(), mean);
    let objective = Objective::new(state, a);
    let directions = hermitian_directions(d);
    let nudges = directions
        .iter()
        .map(|g| (unitary_exp(g, FD_STEP), unitary_exp(g, -FD_STEP)))
        .collect();
    let ascent = Ascent {
        objective: &objective,
        directions: &directions,
        nudges,
        ceiling: state.is_pure().then_some(ceiling),
        options,
    };

    let runs: Vec<Run> = (0..options.restarts)
        .into_par_iter()
        .map(|r| ascent.run(haar_unitary(d, &mut substream(options.seed, r as u64))))
        .collect();
    let restart_objectives: Vec<f64> = runs.iter().map(|r| r.objective).collect();
    let winner = (0..runs.len())
        .reduce(|best, r| if runs[r].objective > runs[best].objective { r } else { best })
        .unwrap();
    let run = runs.into_iter().nth(winner).unwrap();

    let best_basis = gauge_fix(&run.basis);
    let mode = ZeroProbMode::default_for(state);
    let best_fisher = fisher_information(state, &Measurement::Basis(best_basis.clone()), a, mode)?;
    Ok(OptimizationResult {
        best_basis,
        best_fisher,
        ceiling,
        gap: ceiling - best_fisher,
        trace: run.trace,
        converged: run.converged,
        restart: winner,
        restart_objectives,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OptimalityCertificate {
    /// `max_m |Re[A_w(m)] − ⟨A⟩|` over outcomes with defined weak values.
    pub re_deviation: f64,
    /// `4·Var(A) − F`.
    pub gap: f64,
}

/// Checks the optimality condition for a basis: all real weak values equal
/// the mean, and the Fisher information reaches `4·Var(A)`.
pub fn certify_optimum(state: &QuantumState, a: &HermitianOperator, basis: &CMatrix) -> Result<OptimalityCertificate> {
    if !state.is_pure() {
        return Err(Error::UnsupportedForIdentity {
            operation: "optimality certificate",
        });
    }
    let measurement = Measurement::Basis(basis.clone());
    let profile = weak_value_profile(state, &measurement, a)?;
    let re_deviation = profile
        .outcomes
        .iter()
        .filter_map(|o| o.weak_value)
        .map(|w| (w.re - profile.mean_a).abs())
        .fold(0.0, f64::max);
    let fisher = fisher_information(state, &measurement, a, ZeroProbMode::LimitCorrect)?;
    Ok(OptimalityCertificate {
        re_deviation,
        gap: 4.0 * profile.var_in - fisher,
    })
}
