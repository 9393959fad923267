//! Domain types, validation, unitary phase evolution and outcome probabilities.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    self, hermiticity_residual, identity_residual, inner, trace_product, CMatrix, CVector, Spectrum,
};

/// Numerical tolerances used by validation and probability clamping.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Tolerances {
    pub herm: f64,
    pub norm: f64,
    pub psd: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            herm: 1e-10,
            norm: 1e-10,
            psd: 1e-9,
        }
    }
}

/// Self-adjoint generator `A` of the phase shift `U = exp(-iφA)`.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator(CMatrix);

impl HermitianOperator {
    /// Wraps `m`, rejecting non-square or non-Hermitian input.
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::Dimension {
                what: "generator columns",
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        let residual = hermiticity_residual(&m);
        if residual > Tolerances::default().herm {
            return Err(Error::InvalidOperator { residual });
        }
        Ok(HermitianOperator(m))
    }

    /// Wraps `m` without any check. Use [`validate`] afterwards.
    pub fn new_unchecked(m: CMatrix) -> Self {
        HermitianOperator(m)
    }

    pub fn identity(dim: usize) -> Self {
        HermitianOperator(CMatrix::identity(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn spectrum(&self) -> Spectrum {
        Spectrum::of(&self.0)
    }

    /// `A - c·I`.
    pub fn shifted(&self, shift: f64) -> HermitianOperator {
        let mut m = self.0.clone();
        for k in 0..m.nrows() {
            m[(k, k)] -= linalg::c(shift, 0.0);
        }
        HermitianOperator(m)
    }

    /// `exp(-iφA)`.
    pub fn unitary(&self, phi: f64) -> CMatrix {
        linalg::unitary_exp(&self.0, phi)
    }
}

/// Initial state: a normalized vector or a density matrix.
#[derive(Clone, Debug, PartialEq)]
pub enum QuantumState {
    Pure(CVector),
    Mixed(CMatrix),
}

impl QuantumState {
    pub fn dim(&self) -> usize {
        match self {
            QuantumState::Pure(v) => v.len(),
            QuantumState::Mixed(rho) => rho.nrows(),
        }
    }

    pub fn is_pure(&self) -> bool {
        matches!(self, QuantumState::Pure(_))
    }

    pub fn density_matrix(&self) -> CMatrix {
        match self {
            QuantumState::Pure(v) => linalg::projector(v),
            QuantumState::Mixed(rho) => rho.clone(),
        }
    }

    /// `Tr{Aρ}` (real part).
    pub fn expectation(&self, a: &CMatrix) -> f64 {
        match self {
            QuantumState::Pure(v) => inner(v, &(a * v)).re,
            QuantumState::Mixed(rho) => trace_product(a, rho).re,
        }
    }

    /// `Tr{(A - c)² ρ}` evaluated without expanding the square.
    pub fn centered_second_moment(&self, a: &CMatrix, shift: f64) -> f64 {
        let mut centered = a.clone();
        for k in 0..centered.nrows() {
            centered[(k, k)] -= linalg::c(shift, 0.0);
        }
        match self {
            QuantumState::Pure(v) => (&centered * v).norm_squared(),
            QuantumState::Mixed(rho) => trace_product(&(&centered * &centered), rho).re,
        }
    }

    /// Mixes a pure state with white noise: `v|ψ⟩⟨ψ| + (1-v) I/d`.
    pub fn depolarized(&self, visibility: f64) -> QuantumState {
        let d = self.dim();
        let rho = self.density_matrix().scale(visibility)
            + CMatrix::identity(d, d).scale((1.0 - visibility) / d as f64);
        QuantumState::Mixed(rho)
    }
}

/// One effect of a measurement: a basis vector `|m⟩` or an operator `Π_m`.
#[derive(Clone, Debug, PartialEq)]
pub enum Effect {
    Vector(CVector),
    Operator(CMatrix),
}

impl Effect {
    pub fn dim(&self) -> usize {
        match self {
            Effect::Vector(v) => v.len(),
            Effect::Operator(p) => p.nrows(),
        }
    }

    pub fn operator(&self) -> CMatrix {
        match self {
            Effect::Vector(v) => linalg::projector(v),
            Effect::Operator(p) => p.clone(),
        }
    }
}

/// Final measurement: an orthonormal basis (columns of the matrix) or a POVM.
#[derive(Clone, Debug, PartialEq)]
pub enum Measurement {
    Basis(CMatrix),
    Povm(Vec<CMatrix>),
}

impl Measurement {
    pub fn basis_from_vectors(vectors: &[CVector]) -> Measurement {
        Measurement::Basis(CMatrix::from_columns(vectors))
    }

    pub fn dim(&self) -> usize {
        match self {
            Measurement::Basis(b) => b.nrows(),
            Measurement::Povm(effects) => effects.first().map_or(0, |e| e.nrows()),
        }
    }

    pub fn outcome_count(&self) -> usize {
        match self {
            Measurement::Basis(b) => b.ncols(),
            Measurement::Povm(effects) => effects.len(),
        }
    }

    pub fn is_projective(&self) -> bool {
        matches!(self, Measurement::Basis(_))
    }

    pub fn effect(&self, m: usize) -> Result<Effect> {
        let count = self.outcome_count();
        if m >= count {
            return Err(Error::OutcomeIndex { outcome: m, count });
        }
        Ok(match self {
            Measurement::Basis(b) => Effect::Vector(b.column(m).into_owned()),
            Measurement::Povm(effects) => Effect::Operator(effects[m].clone()),
        })
    }

    pub fn effects(&self) -> Vec<Effect> {
        (0..self.outcome_count())
            .map(|m| self.effect(m).expect("index in range"))
            .collect()
    }

    /// Applies `V` to every effect: `V|m⟩` or `V Π_m V†`.
    pub fn transformed(&self, v: &CMatrix) -> Measurement {
        match self {
            Measurement::Basis(b) => Measurement::Basis(v * b),
            Measurement::Povm(effects) => {
                Measurement::Povm(effects.iter().map(|e| v * e * v.adjoint()).collect())
            }
        }
    }
}

/// A preparation, a generator, a final measurement and the working phase.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub state: QuantumState,
    pub measurement: Measurement,
    pub generator: HermitianOperator,
    pub phase: f64,
}

impl Scenario {
    pub fn new(state: QuantumState, measurement: Measurement, generator: HermitianOperator) -> Self {
        Scenario {
            state,
            measurement,
            generator,
            phase: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.generator.dim()
    }

    /// The state rotated to the working phase, `exp(-i·phase·A)` applied.
    pub fn rotated_state(&self) -> Result<QuantumState> {
        evolve(&self.state, &self.generator, self.phase)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    fn upper(name: &'static str, residual: f64, tolerance: f64) -> Check {
        Check {
            name,
            residual,
            tolerance,
            passed: residual <= tolerance,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn ensure_dim(what: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::Dimension {
            what,
            expected,
            found,
        })
    }
}

/// Checks every invariant of the scenario and reports the measured residuals.
///
/// Only a dimension mismatch is an error; invariant violations are reported
/// as failed checks.
pub fn validate(scenario: &Scenario, tol: &Tolerances) -> Result<ValidationReport> {
    let a = scenario.generator.matrix();
    let d = a.nrows();
    if d == 0 {
        return Err(Error::Parameter("dimension must be at least 1".into()));
    }
    ensure_dim("generator columns", d, a.ncols())?;
    match &scenario.state {
        QuantumState::Pure(v) => ensure_dim("state vector", d, v.len())?,
        QuantumState::Mixed(rho) => {
            ensure_dim("density matrix rows", d, rho.nrows())?;
            ensure_dim("density matrix columns", d, rho.ncols())?;
        }
    }
    match &scenario.measurement {
        Measurement::Basis(b) => {
            ensure_dim("basis vector", d, b.nrows())?;
            ensure_dim("basis size", d, b.ncols())?;
        }
        Measurement::Povm(effects) => {
            if effects.is_empty() {
                return Err(Error::Parameter("POVM has no effects".into()));
            }
            for e in effects {
                ensure_dim("POVM effect rows", d, e.nrows())?;
                ensure_dim("POVM effect columns", d, e.ncols())?;
            }
        }
    }

    let mut checks = vec![Check::upper("hermitian", hermiticity_residual(a), tol.herm)];
    checks.extend(validate_state(&scenario.state, tol).checks);
    checks.extend(validate_measurement(&scenario.measurement, tol).checks);
    Ok(ValidationReport { checks })
}

pub fn validate_state(state: &QuantumState, tol: &Tolerances) -> ValidationReport {
    let checks = match state {
        QuantumState::Pure(v) => vec![Check::upper("normalization", (v.norm() - 1.0).abs(), tol.norm)],
        QuantumState::Mixed(rho) => {
            let trace = rho.trace();
            vec![
                Check::upper("trace", (trace - linalg::ONE).norm(), tol.norm),
                Check::upper("state-hermitian", hermiticity_residual(rho), tol.herm),
                Check::upper("positivity", (-Spectrum::of(rho).min()).max(0.0), tol.psd),
            ]
        }
    };
    ValidationReport { checks }
}

pub fn validate_measurement(measurement: &Measurement, tol: &Tolerances) -> ValidationReport {
    let checks = match measurement {
        Measurement::Basis(b) => {
            let gram = b.adjoint() * b;
            vec![Check::upper("orthonormality", identity_residual(&gram), tol.norm)]
        }
        Measurement::Povm(effects) => {
            let d = measurement.dim();
            let herm = effects.iter().map(hermiticity_residual).fold(0.0, f64::max);
            let neg = effects
                .iter()
                .map(|e| (-Spectrum::of(e).min()).max(0.0))
                .fold(0.0, f64::max);
            let sum = effects
                .iter()
                .fold(CMatrix::zeros(d, d), |acc, e| acc + e);
            vec![
                Check::upper("effect-hermitian", herm, tol.herm),
                Check::upper("effect-positivity", neg, tol.psd),
                Check::upper("completeness", identity_residual(&sum), tol.norm),
            ]
        }
    };
    ValidationReport { checks }
}

/// Applies `U = exp(-iφA)`: `U|ψ⟩` for pure states, `UρU†` for mixed states.
pub fn evolve(state: &QuantumState, a: &HermitianOperator, phi: f64) -> Result<QuantumState> {
    ensure_dim("state", a.dim(), state.dim())?;
    let residual = hermiticity_residual(a.matrix());
    if residual > Tolerances::default().herm {
        return Err(Error::InvalidOperator { residual });
    }
    if phi == 0.0 {
        return Ok(state.clone());
    }
    let u = a.unitary(phi);
    Ok(match state {
        QuantumState::Pure(v) => QuantumState::Pure(&u * v),
        QuantumState::Mixed(rho) => QuantumState::Mixed(&u * rho * u.adjoint()),
    })
}

/// `Tr{Π ρ}` for a single effect, unclamped.
pub fn raw_probability(state: &QuantumState, effect: &Effect) -> f64 {
    match (state, effect) {
        (QuantumState::Pure(psi), Effect::Vector(m)) => inner(m, psi).norm_sqr(),
        (QuantumState::Pure(psi), Effect::Operator(p)) => inner(psi, &(p * psi)).re,
        (QuantumState::Mixed(rho), Effect::Vector(m)) => inner(m, &(rho * m)).re,
        (QuantumState::Mixed(rho), Effect::Operator(p)) => trace_product(p, rho).re,
    }
}

/// Clamps a probability that is within `tol` of `[0, 1]`; anything further
/// out is an error.
pub fn clamp_probability(outcome: usize, p: f64, tol: f64) -> Result<f64> {
    if !p.is_finite() || p < -tol || p > 1.0 + tol {
        return Err(Error::ProbabilityOutOfRange { outcome, value: p });
    }
    Ok(p.clamp(0.0, 1.0))
}

/// Outcome probabilities `p(m; φ) = Tr{Π_m U ρ U†}`.
pub fn outcome_probabilities(
    state: &QuantumState,
    measurement: &Measurement,
    a: &HermitianOperator,
    phi: f64,
) -> Result<Vec<f64>> {
    ensure_dim("measurement", state.dim(), measurement.dim())?;
    let evolved = evolve(state, a, phi)?;
    let tol = Tolerances::default().norm;
    measurement
        .effects()
        .iter()
        .enumerate()
        .map(|(m, e)| clamp_probability(m, raw_probability(&evolved, e), tol))
        .collect()
}

/// Single-qubit states, operators and bases in the computational basis.
pub mod qubit {
    use std::f64::consts::FRAC_1_SQRT_2;

    use super::*;
    use crate::linalg::{c, cmat, cvec};

    pub fn sigma_x() -> CMatrix {
        cmat(2, &[(0.0, 0.0), (1.0, 0.0), (1.0, 0.0), (0.0, 0.0)])
    }

    pub fn sigma_y() -> CMatrix {
        cmat(2, &[(0.0, 0.0), (0.0, -1.0), (0.0, 1.0), (0.0, 0.0)])
    }

    pub fn sigma_z() -> CMatrix {
        cmat(2, &[(1.0, 0.0), (0.0, 0.0), (0.0, 0.0), (-1.0, 0.0)])
    }

    /// `σ/2` as a generator.
    pub fn half(pauli: CMatrix) -> HermitianOperator {
        HermitianOperator::new_unchecked(pauli.scale(0.5))
    }

    pub fn ket0() -> CVector {
        cvec(&[(1.0, 0.0), (0.0, 0.0)])
    }

    pub fn ket1() -> CVector {
        cvec(&[(0.0, 0.0), (1.0, 0.0)])
    }

    pub fn plus() -> CVector {
        cvec(&[(FRAC_1_SQRT_2, 0.0), (FRAC_1_SQRT_2, 0.0)])
    }

    pub fn minus() -> CVector {
        cvec(&[(FRAC_1_SQRT_2, 0.0), (-FRAC_1_SQRT_2, 0.0)])
    }

    pub fn y_plus() -> CVector {
        CVector::from_vec(vec![c(FRAC_1_SQRT_2, 0.0), c(0.0, FRAC_1_SQRT_2)])
    }

    pub fn y_minus() -> CVector {
        CVector::from_vec(vec![c(FRAC_1_SQRT_2, 0.0), c(0.0, -FRAC_1_SQRT_2)])
    }

    pub fn z_basis() -> Measurement {
        Measurement::basis_from_vectors(&[ket0(), ket1()])
    }

    pub fn x_basis() -> Measurement {
        Measurement::basis_from_vectors(&[plus(), minus()])
    }

    pub fn y_basis() -> Measurement {
        Measurement::basis_from_vectors(&[y_plus(), y_minus()])
    }

    pub fn maximally_mixed() -> QuantumState {
        QuantumState::Mixed(CMatrix::identity(2, 2).scale(0.5))
    }
}
