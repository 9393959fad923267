//! The identities and inequalities checked by `analyze` and `verify`.

use weakval_core::linalg::max_abs_diff;
use weakval_core::metrology::{
    bound_check, cauchy_schwarz_gap, estimate_uncertainty, fisher_information, log_derivative, log_derivative_fd,
    pure_sensitivity_decomposition, Strictness, ZeroProbMode,
};
use weakval_core::quantum::{HermitianOperator, Measurement, QuantumState};
use weakval_core::split::split_operator_flagged;
use weakval_core::weak::{weak_value_profile, weak_value_via_gamma, weak_variance_identity};
use weakval_core::Result;

use crate::report::CheckRecord;

pub const LOG_DERIVATIVE: &str = "log-derivative";
pub const WEAK_VARIANCE: &str = "weak-variance";
pub const SENSITIVITY: &str = "sensitivity-decomposition";
pub const ESTIMATE: &str = "estimate-uncertainty";
pub const BOUND: &str = "time-symmetric-bound";
pub const CAUCHY_SCHWARZ: &str = "cauchy-schwarz";
pub const GAMMA: &str = "gamma-expansion";
pub const SPLIT: &str = "operator-split";

/// Every identity, in matrix order.
pub const ALL: [&str; 8] = [LOG_DERIVATIVE, WEAK_VARIANCE, SENSITIVITY, ESTIMATE, BOUND, CAUCHY_SCHWARZ, GAMMA, SPLIT];

pub fn tolerance(identity: &str) -> f64 {
    match identity {
        LOG_DERIVATIVE => 1e-6,
        WEAK_VARIANCE | GAMMA => 1e-10,
        _ => 1e-9,
    }
}

/// Finite-difference step for the log-derivative check.
pub const FD_STEP: f64 = 1e-5;
/// Outcomes rarer than this are skipped by the finite-difference check.
pub const FD_MIN_PROBABILITY: f64 = 1e-6;

fn record(identity: &str, residual: f64) -> CheckRecord {
    CheckRecord::upper(identity, residual, tolerance(identity))
}

/// `max_m |2·Im[A_w(m)] − ∂_φ ln p(m)|` with a central difference.
pub fn log_derivative_residual(state: &QuantumState, measurement: &Measurement, a: &HermitianOperator) -> Result<f64> {
    let profile = weak_value_profile(state, measurement, a)?;
    let mut worst: f64 = 0.0;
    for o in profile.outcomes.iter().filter(|o| o.probability >= FD_MIN_PROBABILITY) {
        let exact = log_derivative(state, measurement, a, o.index)?;
        let fd = log_derivative_fd(state, measurement, a, o.index, FD_STEP)?;
        worst = worst.max((exact - fd).abs());
    }
    Ok(worst)
}

/// Checks that apply to any state and measurement.
pub fn general_checks(state: &QuantumState, measurement: &Measurement, a: &HermitianOperator, mode: ZeroProbMode) -> Result<Vec<CheckRecord>> {
    let exact_limit = state.is_pure() && measurement.is_projective() && mode == ZeroProbMode::LimitCorrect;
    let report = bound_check(state, measurement, a, Some(mode), Strictness::ReportOnly)?;
    let bound_residual = if exact_limit { report.bound_slack.abs() } else { (-report.bound_slack).max(0.0) };
    let cs = cauchy_schwarz_gap(state, measurement, a)?;
    let cs_residual = if state.is_pure() && measurement.is_projective() { cs.gap.abs() } else { (-cs.gap).max(0.0) };
    Ok(vec![
        record(LOG_DERIVATIVE, log_derivative_residual(state, measurement, a)?),
        record(BOUND, bound_residual),
        record(CAUCHY_SCHWARZ, cs_residual),
    ])
}

/// Checks that hold for pure states measured in an orthonormal basis.
pub fn pure_projective_checks(state: &QuantumState, measurement: &Measurement, a: &HermitianOperator) -> Result<Vec<CheckRecord>> {
    let variance = weak_variance_identity(state, measurement, a)?.residual();
    let sensitivity = pure_sensitivity_decomposition(state, measurement, a, Strictness::ReportOnly)?.residual();

    let (QuantumState::Pure(psi), Measurement::Basis(basis)) = (state, measurement) else {
        unreachable!("checked by the identities above")
    };
    let profile = weak_value_profile(state, measurement, a)?;
    let mut error = a.matrix() * psi;
    for o in &profile.outcomes {
        if let Some(w) = o.weak_value {
            let m = basis.column(o.index);
            error -= m * (m.dotc(psi) * w.re);
        }
    }
    let estimate = (estimate_uncertainty(state, measurement, a, Strictness::ReportOnly)? - error.norm_squared()).abs();

    let mut gamma: f64 = 0.0;
    for o in &profile.outcomes {
        if let Some(w) = o.weak_value {
            let via = weak_value_via_gamma(state, measurement, a, o.index)?.value;
            gamma = gamma.max((via - w).norm() / (1.0 + w.norm()));
        }
    }

    let mut checks = vec![
        record(WEAK_VARIANCE, variance),
        record(SENSITIVITY, sensitivity),
        record(ESTIMATE, estimate),
        record(GAMMA, gamma),
    ];
    // with a zero-overlap outcome the γ phase is arbitrary and the split carries no meaning
    let split = split_operator_flagged(state, measurement, a)?;
    if split.degenerate {
        return Ok(checks);
    }
    let sum = split.symmetric_part.matrix() + split.generator_part.matrix();
    let mode = ZeroProbMode::LimitCorrect;
    let full = fisher_information(state, measurement, a, mode)?;
    let sym = fisher_information(state, measurement, &split.symmetric_part, mode)?;
    let gen = fisher_information(state, measurement, &split.generator_part, mode)?;
    let split_residual = max_abs_diff(&sum, a.matrix()).max(sym.abs()).max((full - gen).abs());

    checks.push(record(SPLIT, split_residual));
    Ok(checks)
}

/// All checks that apply to the input, in [`ALL`] order.
pub fn applicable_checks(state: &QuantumState, measurement: &Measurement, a: &HermitianOperator, mode: ZeroProbMode) -> Result<Vec<CheckRecord>> {
    let mut checks = general_checks(state, measurement, a, mode)?;
    if state.is_pure() && measurement.is_projective() {
        checks.extend(pure_projective_checks(state, measurement, a)?);
    }
    checks.sort_by_key(|c| ALL.iter().position(|n| *n == c.identity));
    Ok(checks)
}

/// Sum of weak-value numerators minus `⟨A⟩`, and `Σp − 1`.
pub fn profile_checks(state: &QuantumState, measurement: &Measurement, a: &HermitianOperator) -> Result<Vec<CheckRecord>> {
    let profile = weak_value_profile(state, measurement, a)?;
    Ok(vec![
        CheckRecord::upper("probability-sum", profile.probability_residual(), 1e-10),
        CheckRecord::upper("mean-rule", profile.mean_rule_residual(), 1e-10),
    ])
}
