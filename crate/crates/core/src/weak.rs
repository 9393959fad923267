//! Complex weak values of a generator between a preparation and the outcomes
//! of a final measurement.
//!
//! For outcome `m` with effect `Π_m` the weak value is
//! `Tr{Π_m A ρ} / Tr{Π_m ρ}`, which for a pure state and a basis vector reduces
//! to `⟨m|A|ψ⟩/⟨m|ψ⟩`. Outcomes with `Tr{Π_m ρ} < EPS_PROB` have no weak
//! value; aggregate sums use the numerator form so that the probability
//! cancels instead of being divided out.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{inner, trace_product, CMatrix, CVector, C64};
use crate::quantum::{clamp_probability, Effect, HermitianOperator, Measurement, QuantumState, Tolerances};

/// Outcomes below this probability are treated as never occurring.
pub const EPS_PROB: f64 = 1e-12;

/// Numerator `Tr{Π A ρ}` and denominator `Tr{Π ρ}` of one weak value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeakTerms {
    pub numerator: C64,
    pub probability: f64,
}

impl WeakTerms {
    pub fn is_defined(&self) -> bool {
        self.probability >= EPS_PROB
    }

    pub fn weak_value(&self) -> Option<C64> {
        self.is_defined().then(|| self.numerator / self.probability)
    }
}

fn check_dims(state: &QuantumState, dim: usize, a: &HermitianOperator) -> Result<()> {
    for (what, found) in [("effect", dim), ("generator", a.dim())] {
        if found != state.dim() {
            return Err(Error::Dimension {
                what,
                expected: state.dim(),
                found,
            });
        }
    }
    Ok(())
}

pub(crate) fn raw_terms(state: &QuantumState, effect: &Effect, a: &CMatrix) -> (C64, f64) {
    match (state, effect) {
        (QuantumState::Pure(psi), Effect::Vector(m)) => {
            let amp = inner(m, psi);
            (inner(m, &(a * psi)) * amp.conj(), amp.norm_sqr())
        }
        (QuantumState::Pure(psi), Effect::Operator(p)) => {
            let pa = p * psi;
            (inner(&pa, &(a * psi)), inner(psi, &pa).re)
        }
        (QuantumState::Mixed(rho), Effect::Vector(m)) => {
            let rho_m = rho * m;
            (inner(m, &(a * &rho_m)), inner(m, &rho_m).re)
        }
        (QuantumState::Mixed(rho), Effect::Operator(p)) => {
            (trace_product(p, &(a * rho)), trace_product(p, rho).re)
        }
    }
}

pub fn weak_terms(state: &QuantumState, effect: &Effect, a: &HermitianOperator) -> Result<WeakTerms> {
    check_dims(state, effect.dim(), a)?;
    let (numerator, p) = raw_terms(state, effect, a.matrix());
    Ok(WeakTerms {
        numerator,
        probability: clamp_probability(0, p, Tolerances::default().norm)?,
    })
}

/// `Tr{Π A ρ}/Tr{Π ρ}`, or `None` when the outcome has probability below
/// [`EPS_PROB`]. Values outside the eigenvalue range of `A` are returned as is.
pub fn weak_value(state: &QuantumState, effect: &Effect, a: &HermitianOperator) -> Result<Option<C64>> {
    Ok(weak_terms(state, effect, a)?.weak_value())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeakOutcome {
    pub index: usize,
    pub probability: f64,
    #[serde(serialize_with = "crate::serialize::opt_complex")]
    pub weak_value: Option<C64>,
    #[serde(serialize_with = "crate::serialize::complex")]
    pub numerator: C64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeakValueProfile {
    pub outcomes: Vec<WeakOutcome>,
    pub mean_a: f64,
    pub var_in: f64,
    pub second_moment: f64,
}

impl WeakValueProfile {
    /// `|Σ_m p(m) − 1|`.
    pub fn probability_residual(&self) -> f64 {
        (self.outcomes.iter().map(|o| o.probability).sum::<f64>() - 1.0).abs()
    }

    /// `|Σ_m Tr{Π_m A ρ} − ⟨A⟩|`.
    pub fn mean_rule_residual(&self) -> f64 {
        let total: C64 = self.outcomes.iter().map(|o| o.numerator).sum();
        (total - C64::new(self.mean_a, 0.0)).norm()
    }
}

/// One [`WeakOutcome`] per effect, plus the initial moments of `A`.
pub fn weak_value_profile(
    state: &QuantumState,
    measurement: &Measurement,
    a: &HermitianOperator,
) -> Result<WeakValueProfile> {
    check_dims(state, measurement.dim(), a)?;
    let tol = Tolerances::default().norm;
    let outcomes = measurement
        .effects()
        .iter()
        .enumerate()
        .map(|(index, e)| {
            let (numerator, p) = raw_terms(state, e, a.matrix());
            let probability = clamp_probability(index, p, tol)?;
            let terms = WeakTerms { numerator, probability };
            Ok(WeakOutcome {
                index,
                probability,
                weak_value: terms.weak_value(),
                numerator,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mean_a = state.expectation(a.matrix());
    let var_in = state.centered_second_moment(a.matrix(), mean_a);
    let second_moment = state.centered_second_moment(a.matrix(), 0.0);
    Ok(WeakValueProfile {
        outcomes,
        mean_a,
        var_in,
        second_moment,
    })
}

/// Both sides of an identity, returned so callers assert rather than assume it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IdentityPair {
    pub lhs: f64,
    pub rhs: f64,
}

impl IdentityPair {
    pub fn residual(&self) -> f64 {
        (self.lhs - self.rhs).abs()
    }
}

pub(crate) fn pure_projective<'a>(
    state: &'a QuantumState,
    measurement: &'a Measurement,
    operation: &'static str,
) -> Result<(&'a CVector, &'a CMatrix)> {
    match (state, measurement) {
        (QuantumState::Pure(psi), Measurement::Basis(b)) => Ok((psi, b)),
        _ => Err(Error::UnsupportedForIdentity { operation }),
    }
}

/// Variance of the complex weak values against the initial variance of `A`.
///
/// `lhs = Σ_m |A_w(m) − ⟨A⟩|² p(m)`, evaluated as `Σ_m |⟨m|(A−⟨A⟩)|ψ⟩|²`;
/// `rhs = ΔA²` in `|ψ⟩`.
pub fn weak_variance_identity(
    state: &QuantumState,
    measurement: &Measurement,
    a: &HermitianOperator,
) -> Result<IdentityPair> {
    let (psi, basis) = pure_projective(state, measurement, "weak variance identity")?;
    check_dims(state, basis.nrows(), a)?;
    let mean = state.expectation(a.matrix());
    let centered = a.shifted(mean);
    let shifted_psi = centered.matrix() * psi;
    let lhs = basis
        .column_iter()
        .map(|m| m.dotc(&shifted_psi).norm_sqr())
        .sum();
    Ok(IdentityPair {
        lhs,
        rhs: state.centered_second_moment(a.matrix(), mean),
    })
}

/// Basis vectors re-phased so that every overlap `⟨γ(m)|ψ⟩` is real and
/// non-negative.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GammaBasis {
    #[serde(serialize_with = "crate::serialize::matrix")]
    pub vectors: CMatrix,
    pub amplitudes: Vec<f64>,
    /// Outcomes with `p(m) < EPS_PROB`; their phase factor is 1.
    pub degenerate: Vec<usize>,
}

impl GammaBasis {
    pub fn vector(&self, m: usize) -> CVector {
        self.vectors.column(m).into_owned()
    }
}

pub fn gamma_basis(state: &QuantumState, measurement: &Measurement) -> Result<GammaBasis> {
    let (psi, basis) = pure_projective(state, measurement, "phase-adjusted basis")?;
    if basis.nrows() != psi.len() {
        return Err(Error::Dimension {
            what: "basis vector",
            expected: psi.len(),
            found: basis.nrows(),
        });
    }
    let mut vectors = basis.clone();
    let mut amplitudes = Vec::with_capacity(basis.ncols());
    let mut degenerate = Vec::new();
    for m in 0..basis.ncols() {
        let overlap = basis.column(m).dotc(psi);
        let magnitude = overlap.norm();
        amplitudes.push(magnitude);
        if magnitude * magnitude < EPS_PROB {
            degenerate.push(m);
            continue;
        }
        let phase = overlap / magnitude;
        for r in 0..vectors.nrows() {
            vectors[(r, m)] *= phase;
        }
    }
    Ok(GammaBasis {
        vectors,
        amplitudes,
        degenerate,
    })
}

/// A weak value assembled from the phase-adjusted basis, with its split into
/// the contribution of the real-symmetric and the imaginary-antisymmetric
/// matrix elements of `A` in that basis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GammaWeakValue {
    pub value: C64,
    pub symmetric_part: C64,
    pub antisymmetric_part: C64,
}

/// `Σ_{m'} ⟨γ(m)|A|γ(m')⟩ |⟨m'|ψ⟩| / |⟨m|ψ⟩|`.
pub fn weak_value_via_gamma(
    state: &QuantumState,
    measurement: &Measurement,
    a: &HermitianOperator,
    m: usize,
) -> Result<GammaWeakValue> {
    let gamma = gamma_basis(state, measurement)?;
    check_dims(state, gamma.vectors.nrows(), a)?;
    let count = gamma.amplitudes.len();
    if m >= count {
        return Err(Error::OutcomeIndex { outcome: m, count });
    }
    let denom = gamma.amplitudes[m];
    if denom * denom < EPS_PROB {
        return Err(Error::UndefinedWeakValue {
            outcome: m,
            probability: denom * denom,
        });
    }
    let row = gamma.vector(m).adjoint() * a.matrix() * &gamma.vectors;
    let (mut sym, mut anti) = (0.0, 0.0);
    for (k, amp) in gamma.amplitudes.iter().enumerate() {
        let w = amp / denom;
        sym += row[(0, k)].re * w;
        anti += row[(0, k)].im * w;
    }
    Ok(GammaWeakValue {
        value: C64::new(sym, anti),
        symmetric_part: C64::new(sym, 0.0),
        antisymmetric_part: C64::new(0.0, anti),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, cmat, identity_residual};
    use crate::quantum::qubit::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    /// Brute-force 2×2 weak value from explicit component arithmetic.
    fn oracle_qubit_weak_value(psi: [C64; 2], m: [C64; 2], a: [[C64; 2]; 2]) -> C64 {
        let a_psi = [a[0][0] * psi[0] + a[0][1] * psi[1], a[1][0] * psi[0] + a[1][1] * psi[1]];
        let num = m[0].conj() * a_psi[0] + m[1].conj() * a_psi[1];
        let den = m[0].conj() * psi[0] + m[1].conj() * psi[1];
        num / den
    }

    fn pure(v: CVector) -> QuantumState {
        QuantumState::Pure(v)
    }

    #[test]
    fn plus_to_y_plus_gives_i_over_two() {
        let s = FRAC_1_SQRT_2;
        let oracle = oracle_qubit_weak_value(
            [c(s, 0.0), c(s, 0.0)],
            [c(s, 0.0), c(0.0, s)],
            [[c(0.5, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-0.5, 0.0)]],
        );
        assert_abs_diff_eq!(oracle.re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(oracle.im, 0.5, epsilon = 1e-15);

        let w = weak_value(&pure(plus()), &Effect::Vector(y_plus()), &half(sigma_z()))
            .unwrap()
            .unwrap();
        assert!((w - oracle).norm() < 1e-15);
    }

    #[test]
    fn identity_generator_has_unit_weak_values() {
        for m in [ket0(), plus(), y_plus()] {
            let w = weak_value(&pure(y_plus()), &Effect::Vector(m), &HermitianOperator::identity(2))
                .unwrap()
                .unwrap();
            assert!((w - c(1.0, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn eigenstate_weak_value_is_eigenvalue() {
        for m in [plus(), y_minus(), ket1()] {
            let w = weak_value(&pure(ket1()), &Effect::Vector(m), &half(sigma_z()))
                .unwrap()
                .unwrap();
            assert!((w - c(-0.5, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn orthogonal_post_selection_is_undefined() {
        let w = weak_value(&pure(plus()), &Effect::Vector(minus()), &half(sigma_z())).unwrap();
        assert_eq!(w, None);
        // the numerator ⟨−|A|+⟩⟨+|−⟩ vanishes even though ⟨−|A|+⟩ = 1/2
        let terms = weak_terms(&pure(plus()), &Effect::Vector(minus()), &half(sigma_z())).unwrap();
        assert_abs_diff_eq!(minus().dotc(&(half(sigma_z()).matrix() * plus())).re, 0.5, epsilon = 1e-15);
        assert!(terms.numerator.norm() < 1e-15);
    }

    #[test]
    fn weak_values_are_not_clamped() {
        // nearly orthogonal post-selection amplifies the weak value far beyond ±1/2
        let theta: f64 = 0.01;
        let m = CVector::from_vec(vec![
            c((PI / 4.0 + theta).cos(), 0.0),
            c(-(PI / 4.0 + theta).sin(), 0.0),
        ]);
        let w = weak_value(&pure(plus()), &Effect::Vector(m), &half(sigma_z()))
            .unwrap()
            .unwrap();
        assert!(w.re.abs() > 10.0);
    }

    #[test]
    fn profiles_of_reference_qubit_scenarios() {
        let prof = weak_value_profile(&pure(plus()), &z_basis(), &half(sigma_z())).unwrap();
        assert_abs_diff_eq!(prof.mean_a, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(prof.var_in, 0.25, epsilon = 1e-15);
        let expect = [(0.5, c(0.5, 0.0)), (0.5, c(-0.5, 0.0))];
        for (o, (p, w)) in prof.outcomes.iter().zip(expect) {
            assert_abs_diff_eq!(o.probability, p, epsilon = 1e-15);
            assert!((o.weak_value.unwrap() - w).norm() < 1e-15);
        }

        let prof = weak_value_profile(&pure(plus()), &y_basis(), &half(sigma_z())).unwrap();
        let expect = [(0.5, c(0.0, 0.5)), (0.5, c(0.0, -0.5))];
        for (o, (p, w)) in prof.outcomes.iter().zip(expect) {
            assert_abs_diff_eq!(o.probability, p, epsilon = 1e-15);
            assert!((o.weak_value.unwrap() - w).norm() < 1e-15);
        }
        assert!(prof.mean_rule_residual() < 1e-15);
        assert!(prof.probability_residual() < 1e-15);
    }

    #[test]
    fn maximally_mixed_weak_values_are_diagonal_elements() {
        let a = HermitianOperator::new(cmat(2, &[(0.3, 0.0), (0.2, -0.7), (0.2, 0.7), (-1.1, 0.0)])).unwrap();
        for basis in [x_basis(), y_basis(), z_basis()] {
            let prof = weak_value_profile(&maximally_mixed(), &basis, &a).unwrap();
            let Measurement::Basis(b) = &basis else { unreachable!() };
            for (o, m) in prof.outcomes.iter().zip(b.column_iter()) {
                let diag = m.dotc(&(a.matrix() * m));
                let w = o.weak_value.unwrap();
                assert!((w - diag).norm() < 1e-14);
                assert!(w.im.abs() < 1e-15);
            }
        }
    }

    #[test]
    fn variance_identity_on_reference_cases() {
        let pair = weak_variance_identity(&pure(plus()), &y_basis(), &half(sigma_z())).unwrap();
        assert_abs_diff_eq!(pair.lhs, 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(pair.rhs, 0.25, epsilon = 1e-15);
        let pair = weak_variance_identity(&pure(ket0()), &x_basis(), &half(sigma_z())).unwrap();
        assert_abs_diff_eq!(pair.lhs, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(pair.rhs, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn variance_identity_rejects_mixed_and_povm() {
        let err = weak_variance_identity(&maximally_mixed(), &z_basis(), &half(sigma_z()));
        assert!(matches!(err, Err(Error::UnsupportedForIdentity { .. })));
        let povm = Measurement::Povm(vec![CMatrix::identity(2, 2)]);
        let err = weak_variance_identity(&pure(plus()), &povm, &half(sigma_z()));
        assert!(matches!(err, Err(Error::UnsupportedForIdentity { .. })));
    }

    #[test]
    fn gamma_basis_examples() {
        let g = gamma_basis(&pure(plus()), &z_basis()).unwrap();
        assert!((g.vector(0) - ket0()).norm() < 1e-15);
        assert!((g.vector(1) - ket1()).norm() < 1e-15);

        // ⟨y+|+⟩ = (1 − i)/2 = e^{−iπ/4}/√2, so γ(y+) = e^{−iπ/4}|y+⟩ and ⟨γ|ψ⟩ = 1/√2
        let g = gamma_basis(&pure(plus()), &y_basis()).unwrap();
        let expected = y_plus() * C64::from_polar(1.0, -PI / 4.0);
        assert!((g.vector(0) - expected).norm() < 1e-15);
        let overlap = g.vector(0).dotc(&plus());
        assert_abs_diff_eq!(overlap.re, FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(overlap.im, 0.0, epsilon = 1e-15);
        assert!(identity_residual(&(g.vectors.adjoint() * &g.vectors)) < 1e-12);
    }

    #[test]
    fn gamma_basis_degenerate_outcome_keeps_phase_one() {
        let g = gamma_basis(&pure(plus()), &x_basis()).unwrap();
        assert_eq!(g.degenerate, vec![1]);
        assert!((g.vector(1) - minus()).norm() < 1e-15);
    }

    #[test]
    fn gamma_expansion_examples() {
        let g = weak_value_via_gamma(&pure(plus()), &y_basis(), &half(sigma_z()), 0).unwrap();
        assert!((g.value - c(0.0, 0.5)).norm() < 1e-15);
        assert!(g.symmetric_part.norm() < 1e-15);
        assert!((g.antisymmetric_part - c(0.0, 0.5)).norm() < 1e-15);

        let g = weak_value_via_gamma(&pure(y_plus()), &x_basis(), &HermitianOperator::identity(2), 1).unwrap();
        assert!((g.value - c(1.0, 0.0)).norm() < 1e-15);
        assert!((g.symmetric_part - c(1.0, 0.0)).norm() < 1e-15);
        assert!(g.antisymmetric_part.norm() < 1e-15);

        let err = weak_value_via_gamma(&pure(plus()), &x_basis(), &half(sigma_z()), 1);
        assert!(matches!(err, Err(Error::UndefinedWeakValue { outcome: 1, .. })));
    }

    #[test]
    fn zero_probability_effect_has_zero_numerator() {
        // ρ supported on |0⟩; effect supported on |1⟩ ⇒ Tr{Πρ} = 0 and Tr{ΠAρ} = 0
        let rho = QuantumState::Mixed(cmat(2, &[(1.0, 0.0), (0.0, 0.0), (0.0, 0.0), (0.0, 0.0)]));
        let effect = Effect::Operator(cmat(2, &[(0.0, 0.0), (0.0, 0.0), (0.0, 0.0), (0.6, 0.0)]));
        let a = half(sigma_x());
        let t = weak_terms(&rho, &effect, &a).unwrap();
        assert_eq!(t.probability, 0.0);
        assert!(t.numerator.norm() <= crate::linalg::hermitian_norm(a.matrix()) * t.probability.sqrt() + 1e-15);
        assert_eq!(t.weak_value(), None);
    }
}
