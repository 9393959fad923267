//! Phase sensitivity of a fixed measurement and its relation to weak-value
//! statistics.
//!
//! The classical Fisher information of the outcome distribution at `φ = 0`
//! is `F = 4 Σ_m Im[A_w(m)]² p(m)`, the log-derivative of each outcome
//! probability being `2 Im[A_w(m)]`. The real parts of the weak values carry
//! the information about `A` gained by the measurement, and
//! `F ≤ 4 ΔA²_est` with `ΔA²_est = ΔA²_in − Σ_m (Re[A_w(m)] − ⟨A⟩)² p(m)`,
//! with equality for pure states and projective measurements.
//!
//! Every sum is evaluated in numerator form, e.g. `Im[Tr{Π_m A ρ}]² / p(m)`,
//! so no weak value is ever divided out of a tiny probability.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{inner, C64};
use crate::quantum::{outcome_probabilities, Effect, HermitianOperator, Measurement, QuantumState};
use crate::weak::{pure_projective, raw_terms, weak_value_profile, WeakValueProfile, EPS_PROB};

/// Absolute tolerance for the embedded equality/inequality assertions.
pub const IDENTITY_TOL: f64 = 1e-9;

/// Treatment of outcomes with `p(m) < EPS_PROB`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroProbMode {
    /// Drop them, as the Fisher sum is written.
    Exclude,
    /// Pure states only: add the `φ → 0` limit `4⟨ψ|(A−⟨A⟩)Π(A−⟨A⟩)|ψ⟩` of
    /// their Fisher term, keeping `F` continuous in `φ`.
    LimitCorrect,
}

impl ZeroProbMode {
    pub fn default_for(state: &QuantumState) -> Self {
        if state.is_pure() {
            ZeroProbMode::LimitCorrect
        } else {
            ZeroProbMode::Exclude
        }
    }
}

/// Whether embedded identity checks return errors or are only reported.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Strictness {
    Strict,
    #[default]
    ReportOnly,
}

fn enforce(strictness: Strictness, identity: &'static str, residual: f64, tolerance: f64) -> Result<()> {
    if strictness == Strictness::Strict && !(residual <= tolerance) {
        return Err(Error::IdentityViolation {
            identity,
            residual,
            tolerance,
        });
    }
    Ok(())
}

/// Per-outcome sums in numerator form.
#[derive(Clone, Copy, Debug)]
struct OutcomeTerms {
    probability: f64,
    numerator: C64,
    /// `⟨ψ|(A−⟨A⟩)Π(A−⟨A⟩)|ψ⟩` for pure states, the limiting Fisher weight.
    limit_weight: Option<f64>,
}

fn outcome_terms(state: &QuantumState, measurement: &Measurement, a: &HermitianOperator) -> Result<(Vec<OutcomeTerms>, WeakValueProfile)> {
    let profile = weak_value_profile(state, measurement, a)?;
    let centered_psi = match state {
        QuantumState::Pure(psi) => Some(a.shifted(profile.mean_a).matrix() * psi),
        QuantumState::Mixed(_) => None,
    };
    let terms = measurement
        .effects()
        .iter()
        .zip(&profile.outcomes)
        .map(|(effect, o)| OutcomeTerms {
            probability: o.probability,
            numerator: o.numerator,
            limit_weight: centered_psi.as_ref().map(|w| match effect {
                Effect::Vector(m) => inner(m, w).norm_sqr(),
                Effect::Operator(p) => inner(w, &(p * w)).re,
            }),
        })
        .collect();
    Ok((terms, profile))
}

/// `∂ ln p(m)/∂φ = 2 Im[A_w(m)]` at `φ = 0`.
pub fn log_derivative(state: &QuantumState, measurement: &Measurement, a: &HermitianOperator, m: usize) -> Result<f64> {
    let effect = measurement.effect(m)?;
    let (numerator, probability) = raw_terms(state, &effect, a.matrix());
    if probability < EPS_PROB {
        return Err(Error::UndefinedLogDerivative { outcome: m, probability });
    }
    Ok(2.0 * numerator.im / probability)
}

/// Central difference `[ln p(m; h) − ln p(m; −h)] / 2h` through explicit
/// evolution of the state.
pub fn log_derivative_fd(
    state: &QuantumState,
    measurement: &Measurement,
    a: &HermitianOperator,
    m: usize,
    h: f64,
) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::Parameter(format!("step {h} must be positive")));
    }
    let count = measurement.outcome_count();
    if m >= count {
        return Err(Error::OutcomeIndex { outcome: m, count });
    }
    let p0 = outcome_probabilities(state, measurement, a, 0.0)?[m];
    if p0 < EPS_PROB {
        return Err(Error::UndefinedLogDerivative { outcome: m, probability: p0 });
    }
    let plus = outcome_probabilities(state, measurement, a, h)?[m];
    let minus = outcome_probabilities(state, measurement, a, -h)?[m];
    if plus < EPS_PROB || minus < EPS_PROB {
        return Err(Error::StepTooLarge { outcome: m, step: h });
    }
    Ok((plus.ln() - minus.ln()) / (2.0 * h))
}

/// Classical Fisher information `Σ_m (∂ ln p(m)/∂φ)² p(m)` at `φ = 0`, in rad⁻².
pub fn fisher_information(
    state: &QuantumState,
    measurement: &Measurement,
    a: &HermitianOperator,
    mode: ZeroProbMode,
) -> Result<f64> {
    if mode == ZeroProbMode::LimitCorrect && !state.is_pure() {
        return Err(Error::UnsupportedMode("limit correction is defined for pure states only"));
    }
    let (terms, _) = outcome_terms(state, measurement, a)?;
    Ok(fisher_from_terms(&terms, mode))
}

fn fisher_from_terms(terms: &[OutcomeTerms], mode: ZeroProbMode) -> f64 {
    4.0 * terms
        .iter()
        .map(|t| {
            if t.probability >= EPS_PROB {
                t.numerator.im * t.numerator.im / t.probability
            } else if mode == ZeroProbMode::LimitCorrect {
                t.limit_weight.unwrap_or(0.0)
            } else {
                0.0
            }
        })
        .sum::<f64>()
}

/// `Σ_{p≥eps} (Re[A_w(m)] − ⟨A⟩)² p(m)`.
fn re_variance(terms: &[OutcomeTerms], mean: f64) -> f64 {
    terms
        .iter()
        .filter(|t| t.probability >= EPS_PROB)
        .map(|t| {
            let dev = t.numerator.re - mean * t.probability;
            dev * dev / t.probability
        })
        .sum()
}

fn im_second_moment(terms: &[OutcomeTerms]) -> f64 {
    terms
        .iter()
        .filter(|t| t.probability >= EPS_PROB)
        .map(|t| t.numerator.im * t.numerator.im / t.probability)
        .sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SensitivityDecomposition {
    pub fisher: f64,
    pub four_var_in: f64,
    pub four_re_variance: f64,
}

impl SensitivityDecomposition {
    /// `|F − (4ΔA²_in − 4 ReVar)|`.
    pub fn residual(&self) -> f64 {
        (self.fisher - (self.four_var_in - self.four_re_variance)).abs()
    }
}

/// Splits `4ΔA²_in` of a pure state into the Fisher information (imaginary
/// weak-value fluctuations, including zero-probability limits) and four
/// times the real weak-value variance.
pub fn pure_sensitivity_decomposition(
    state: &QuantumState,
    measurement: &Measurement,
    a: &HermitianOperator,
    strictness: Strictness,
) -> Result<SensitivityDecomposition> {
    pure_projective(state, measurement, "pure sensitivity decomposition")?;
    let (terms, profile) = outcome_terms(state, measurement, a)?;
    let out = SensitivityDecomposition {
        fisher: fisher_from_terms(&terms, ZeroProbMode::LimitCorrect),
        four_var_in: 4.0 * profile.var_in,
        four_re_variance: 4.0 * re_variance(&terms, profile.mean_a),
    };
    enforce(strictness, "sensitivity decomposition", out.residual(), IDENTITY_TOL)?;
    Ok(out)
}

/// Uncertainty of `A` left after estimating it by `Re[A_w(m)]`:
/// `ΔA²_est = Tr{A²ρ} − Σ_m Re[A_w(m)]² p(m)`.
///
/// Evaluated as `ΔA²_in − Σ (Re[A_w] − ⟨A⟩)² p`. For pure projective input
/// the estimation-error form `‖(A − Σ_m Re[A_w(m)] |m⟩⟨m|) ψ‖²` is computed
/// as well and compared under `Strict`.
pub fn estimate_uncertainty(
    state: &QuantumState,
    measurement: &Measurement,
    a: &HermitianOperator,
    strictness: Strictness,
) -> Result<f64> {
    let (terms, profile) = outcome_terms(state, measurement, a)?;
    let est = profile.var_in - re_variance(&terms, profile.mean_a);
    if let Some(direct) = estimate_uncertainty_direct(state, measurement, a, &terms) {
        enforce(strictness, "estimate uncertainty forms", (direct - est).abs(), IDENTITY_TOL)?;
    }
    Ok(est)
}

fn estimate_uncertainty_direct(
    state: &QuantumState,
    measurement: &Measurement,
    a: &HermitianOperator,
    terms: &[OutcomeTerms],
) -> Option<f64> {
    let (psi, basis) = pure_projective(state, measurement, "").ok()?;
    // ‖(A − Σ_m Re[A_w(m)] |m⟩⟨m|) ψ‖²
    let mut residual = a.matrix() * psi;
    for (m, t) in basis.column_iter().zip(terms) {
        if t.probability >= EPS_PROB {
            let r = t.numerator.re / t.probability;
            residual -= m * (m.dotc(psi) * r);
        }
    }
    Some(residual.norm_squared())
}

/// Phase uncertainty `δφ = 1/√F`, or no sensitivity at all.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseUncertainty {
    Insensitive,
    DeltaPhi(f64),
}

impl PhaseUncertainty {
    pub fn from_fisher(fisher: f64) -> Self {
        if fisher > EPS_PROB {
            PhaseUncertainty::DeltaPhi(fisher.sqrt().recip())
        } else {
            PhaseUncertainty::Insensitive
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OutcomeRecord {
    pub probability: f64,
    #[serde(serialize_with = "crate::serialize::opt_complex")]
    pub weak_value: Option<C64>,
    pub log_derivative: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MetrologyReport {
    pub fisher: f64,
    pub four_var_in: f64,
    pub re_variance: f64,
    pub im_second_moment: f64,
    pub est_variance: f64,
    pub bound_slack: f64,
    pub delta_phi: PhaseUncertainty,
    pub per_outcome: Vec<OutcomeRecord>,
    pub zero_prob_mode: ZeroProbMode,
    /// Outcomes below `EPS_PROB`.
    pub zero_prob_outcomes: Vec<usize>,
    /// Set when a mixed state had zero-probability outcomes, which are always
    /// excluded since no limiting term is defined for them.
    pub mixed_zero_prob_excluded: bool,
}

/// Evaluates the time-symmetric bound `F ≤ 4ΔA²_est`.
///
/// `mode` defaults to [`ZeroProbMode::default_for`]. Under `Strict` the bound
/// itself is enforced, and for pure projective input with `LimitCorrect`
/// its equality.
pub fn bound_check(
    state: &QuantumState,
    measurement: &Measurement,
    a: &HermitianOperator,
    mode: Option<ZeroProbMode>,
    strictness: Strictness,
) -> Result<MetrologyReport> {
    let mode = mode.unwrap_or_else(|| ZeroProbMode::default_for(state));
    if mode == ZeroProbMode::LimitCorrect && !state.is_pure() {
        return Err(Error::UnsupportedMode("limit correction is defined for pure states only"));
    }
    let (terms, profile) = outcome_terms(state, measurement, a)?;
    let fisher = fisher_from_terms(&terms, mode);
    let re_var = re_variance(&terms, profile.mean_a);
    let est_variance = profile.var_in - re_var;
    let bound_slack = 4.0 * est_variance - fisher;

    let per_outcome = terms
        .iter()
        .map(|t| {
            let defined = t.probability >= EPS_PROB;
            OutcomeRecord {
                probability: t.probability,
                weak_value: defined.then(|| t.numerator / t.probability),
                log_derivative: defined.then(|| 2.0 * t.numerator.im / t.probability),
            }
        })
        .collect();
    let zero_prob_outcomes: Vec<usize> = terms
        .iter()
        .enumerate()
        .filter(|(_, t)| t.probability < EPS_PROB)
        .map(|(m, _)| m)
        .collect();

    enforce(strictness, "time-symmetric bound", (-bound_slack).max(0.0), IDENTITY_TOL)?;
    if state.is_pure() && measurement.is_projective() && mode == ZeroProbMode::LimitCorrect {
        enforce(strictness, "time-symmetric bound equality", bound_slack.abs(), IDENTITY_TOL)?;
    }

    Ok(MetrologyReport {
        fisher,
        four_var_in: 4.0 * profile.var_in,
        re_variance: re_var,
        im_second_moment: im_second_moment(&terms),
        est_variance,
        bound_slack,
        delta_phi: PhaseUncertainty::from_fisher(fisher),
        per_outcome,
        zero_prob_mode: mode,
        mixed_zero_prob_excluded: !state.is_pure() && !zero_prob_outcomes.is_empty(),
        zero_prob_outcomes,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CauchySchwarzGap {
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
}

/// `Σ_m |Tr{Π_m A ρ}|² / Tr{Π_m ρ} ≤ Tr{A²ρ}`.
///
/// Pure states with basis measurements use the exactly cancelled term
/// `|⟨m|A|ψ⟩|²`; otherwise zero-probability terms count as `0/0 → 0`.
pub fn cauchy_schwarz_gap(state: &QuantumState, measurement: &Measurement, a: &HermitianOperator) -> Result<CauchySchwarzGap> {
    let profile = weak_value_profile(state, measurement, a)?;
    let lhs = match (state, measurement) {
        (QuantumState::Pure(psi), Measurement::Basis(b)) => {
            let a_psi = a.matrix() * psi;
            b.column_iter().map(|m| m.dotc(&a_psi).norm_sqr()).sum()
        }
        _ => profile
            .outcomes
            .iter()
            .filter(|o| o.probability >= EPS_PROB)
            .map(|o| o.numerator.norm_sqr() / o.probability)
            .sum(),
    };
    let rhs = profile.second_moment;
    Ok(CauchySchwarzGap { lhs, rhs, gap: rhs - lhs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{cmat, CMatrix};
    use crate::quantum::qubit::*;
    use approx::assert_abs_diff_eq;

    fn pure(v: crate::linalg::CVector) -> QuantumState {
        QuantumState::Pure(v)
    }

    /// Fisher information of a closed-form `p(m; φ)` by central differences
    /// of the probabilities themselves.
    fn fisher_oracle(probs: impl Fn(f64) -> Vec<f64>, phi: f64) -> f64 {
        let h = 1e-6;
        let (p, pp, pm) = (probs(phi), probs(phi + h), probs(phi - h));
        p.iter()
            .zip(pp.iter().zip(&pm))
            .filter(|(p, _)| **p > 0.0)
            .map(|(p, (a, b))| {
                let d = (a - b) / (2.0 * h);
                d * d / p
            })
            .sum()
    }

    #[test]
    fn log_derivative_examples() {
        let ld = log_derivative(&pure(plus()), &y_basis(), &half(sigma_z()), 0).unwrap();
        assert_abs_diff_eq!(ld, 1.0, epsilon = 1e-15);
        for m in 0..2 {
            let ld = log_derivative(&pure(ket0()), &x_basis(), &half(sigma_z()), m).unwrap();
            assert_abs_diff_eq!(ld, 0.0, epsilon = 1e-15);
        }
        // exchanging the roles of |+⟩ and |y+⟩ flips the sign
        let swapped = Measurement::basis_from_vectors(&[plus(), minus()]);
        let ld = log_derivative(&pure(y_plus()), &swapped, &half(sigma_z()), 0).unwrap();
        assert_abs_diff_eq!(ld, -1.0, epsilon = 1e-15);
    }

    #[test]
    fn log_derivative_undefined_at_zero_probability() {
        let err = log_derivative(&pure(plus()), &x_basis(), &half(sigma_z()), 1);
        assert!(matches!(err, Err(Error::UndefinedLogDerivative { outcome: 1, .. })));
    }

    #[test]
    fn finite_difference_examples() {
        let fd = log_derivative_fd(&pure(plus()), &y_basis(), &half(sigma_z()), 0, 1e-5).unwrap();
        assert_abs_diff_eq!(fd, 1.0, epsilon = 1e-9);
        let fd = log_derivative_fd(&pure(y_minus()), &x_basis(), &HermitianOperator::identity(2), 1, 1e-5).unwrap();
        assert_abs_diff_eq!(fd, 0.0, epsilon = 1e-10);
        assert!(log_derivative_fd(&pure(plus()), &y_basis(), &half(sigma_z()), 0, 0.0).is_err());
    }

    #[test]
    fn finite_difference_step_reaching_a_node() {
        // p(y+; φ) = (1 + sin φ)/2 vanishes at φ = −π/2
        let err = log_derivative_fd(&pure(plus()), &y_basis(), &half(sigma_z()), 0, std::f64::consts::FRAC_PI_2);
        assert!(matches!(err, Err(Error::StepTooLarge { .. })));
    }

    #[test]
    fn fisher_of_reference_scenarios() {
        // p(y±; φ) = (1 ± sin φ)/2
        let oracle = fisher_oracle(|phi| vec![(1.0 + phi.sin()) / 2.0, (1.0 - phi.sin()) / 2.0], 0.0);
        assert_abs_diff_eq!(oracle, 1.0, epsilon = 1e-8);
        let f = fisher_information(&pure(plus()), &y_basis(), &half(sigma_z()), ZeroProbMode::LimitCorrect).unwrap();
        assert_abs_diff_eq!(f, 1.0, epsilon = 1e-15);

        let f = fisher_information(&pure(plus()), &z_basis(), &half(sigma_z()), ZeroProbMode::LimitCorrect).unwrap();
        assert_abs_diff_eq!(f, 0.0, epsilon = 1e-15);

        let f = fisher_information(&maximally_mixed(), &y_basis(), &half(sigma_x()), ZeroProbMode::Exclude).unwrap();
        assert_abs_diff_eq!(f, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn limit_correction_on_zero_probability_outcome() {
        // p = (cos²(φ/2), sin²(φ/2)): Fisher is 1 for every φ ≠ 0, so its limit at 0 is 1
        let probs = |phi: f64| vec![(phi / 2.0).cos().powi(2), (phi / 2.0).sin().powi(2)];
        for phi in [1e-2, 1e-3] {
            assert_abs_diff_eq!(fisher_oracle(probs, phi), 1.0, epsilon = 1e-5);
        }
        let lc = fisher_information(&pure(plus()), &x_basis(), &half(sigma_z()), ZeroProbMode::LimitCorrect).unwrap();
        let ex = fisher_information(&pure(plus()), &x_basis(), &half(sigma_z()), ZeroProbMode::Exclude).unwrap();
        assert_abs_diff_eq!(lc, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(ex, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn limit_correction_rejected_for_mixed_states() {
        let err = fisher_information(&maximally_mixed(), &z_basis(), &half(sigma_z()), ZeroProbMode::LimitCorrect);
        assert!(matches!(err, Err(Error::UnsupportedMode(_))));
    }

    #[test]
    fn decomposition_examples() {
        let cases = [
            (plus(), y_basis(), (1.0, 1.0, 0.0)),
            (plus(), z_basis(), (0.0, 1.0, 1.0)),
            (ket1(), y_basis(), (0.0, 0.0, 0.0)),
            (plus(), x_basis(), (1.0, 1.0, 0.0)),
        ];
        for (psi, basis, (f, v, r)) in cases {
            let d = pure_sensitivity_decomposition(&pure(psi), &basis, &half(sigma_z()), Strictness::Strict).unwrap();
            assert_abs_diff_eq!(d.fisher, f, epsilon = 1e-15);
            assert_abs_diff_eq!(d.four_var_in, v, epsilon = 1e-15);
            assert_abs_diff_eq!(d.four_re_variance, r, epsilon = 1e-15);
        }
        let err = pure_sensitivity_decomposition(&maximally_mixed(), &y_basis(), &half(sigma_z()), Strictness::Strict);
        assert!(matches!(err, Err(Error::UnsupportedForIdentity { .. })));
    }

    #[test]
    fn estimate_uncertainty_examples() {
        let e = estimate_uncertainty(&pure(plus()), &z_basis(), &half(sigma_z()), Strictness::Strict).unwrap();
        assert_abs_diff_eq!(e, 0.0, epsilon = 1e-15);
        let e = estimate_uncertainty(&pure(plus()), &y_basis(), &half(sigma_z()), Strictness::Strict).unwrap();
        assert_abs_diff_eq!(e, 0.25, epsilon = 1e-15);
        let e = estimate_uncertainty(&maximally_mixed(), &z_basis(), &half(sigma_z()), Strictness::Strict).unwrap();
        assert_abs_diff_eq!(e, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn bound_check_examples() {
        // ρ = 0.9|+⟩⟨+| + 0.1 I/2 measured in σ_y: by hand p = 1/2,
        // Tr{Π_± A ρ} = ±0.225 i, so F = 2·4·0.225²/0.5 = 0.81 and ΔA²_est = 1/4.
        let rho = pure(plus()).depolarized(0.9);
        let r = bound_check(&rho, &y_basis(), &half(sigma_z()), None, Strictness::Strict).unwrap();
        assert_eq!(r.zero_prob_mode, ZeroProbMode::Exclude);
        assert_abs_diff_eq!(r.fisher, 0.81, epsilon = 1e-14);
        assert_abs_diff_eq!(r.est_variance, 0.25, epsilon = 1e-14);
        assert!(r.bound_slack > 0.18);

        let r = bound_check(&pure(y_plus()), &x_basis(), &HermitianOperator::identity(2), None, Strictness::Strict).unwrap();
        assert_abs_diff_eq!(r.fisher, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.est_variance, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.bound_slack, 0.0, epsilon = 1e-15);
        assert_eq!(r.delta_phi, PhaseUncertainty::Insensitive);

        let r = bound_check(&pure(plus()), &x_basis(), &half(sigma_z()), None, Strictness::Strict).unwrap();
        assert_eq!(r.zero_prob_outcomes, vec![1]);
        assert_eq!(r.per_outcome[1].weak_value, None);
        assert_abs_diff_eq!(r.bound_slack, 0.0, epsilon = 1e-15);
        let PhaseUncertainty::DeltaPhi(dphi) = r.delta_phi else { panic!("sensitive") };
        assert_abs_diff_eq!(dphi, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn strict_mode_reports_violations() {
        // Exclude mode on a zero-probability outcome breaks the pure-state equality
        let r = bound_check(&pure(plus()), &x_basis(), &half(sigma_z()), Some(ZeroProbMode::Exclude), Strictness::Strict);
        assert!(r.is_ok(), "inequality holds and equality is only enforced in LimitCorrect mode");
        let r = bound_check(&pure(plus()), &x_basis(), &half(sigma_z()), Some(ZeroProbMode::Exclude), Strictness::ReportOnly).unwrap();
        assert_abs_diff_eq!(r.bound_slack, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn mixed_zero_probability_outcomes_are_flagged() {
        let rho = QuantumState::Mixed(cmat(2, &[(1.0, 0.0), (0.0, 0.0), (0.0, 0.0), (0.0, 0.0)]));
        let r = bound_check(&rho, &z_basis(), &half(sigma_x()), None, Strictness::Strict).unwrap();
        assert!(r.mixed_zero_prob_excluded);
        assert_eq!(r.zero_prob_outcomes, vec![1]);
    }

    #[test]
    fn cauchy_schwarz_examples() {
        let g = cauchy_schwarz_gap(&maximally_mixed(), &z_basis(), &half(sigma_x())).unwrap();
        assert_abs_diff_eq!(g.lhs, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(g.rhs, 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(g.gap, 0.25, epsilon = 1e-15);
        for basis in [x_basis(), y_basis(), z_basis()] {
            let g = cauchy_schwarz_gap(&pure(plus()), &basis, &half(sigma_z())).unwrap();
            assert_abs_diff_eq!(g.gap, 0.0, epsilon = 1e-15);
        }
        let povm = Measurement::Povm(vec![CMatrix::identity(2, 2).scale(0.5); 2]);
        let g = cauchy_schwarz_gap(&pure(plus()), &povm, &half(sigma_z())).unwrap();
        assert_abs_diff_eq!(g.gap, 0.25, epsilon = 1e-15);
    }
}
