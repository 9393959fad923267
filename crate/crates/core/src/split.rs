//! Decomposition of a generator relative to a pure state and a basis.
//!
//! Written in the phase-adjusted basis `{|γ(m)⟩}`, the real symmetric part of
//! the matrix of `A` only moves the real parts of the weak values and the
//! imaginary antisymmetric part only moves the imaginary parts. The first is
//! invisible to phase estimation with this measurement, the second carries all
//! of its Fisher information.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix, C64};
use crate::metrology::{fisher_information, ZeroProbMode};
use crate::quantum::{HermitianOperator, Measurement, QuantumState};
use crate::weak::{gamma_basis, weak_value_profile, GammaBasis};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OperatorSplit {
    #[serde(serialize_with = "crate::serialize::hermitian")]
    pub symmetric_part: HermitianOperator,
    #[serde(serialize_with = "crate::serialize::hermitian")]
    pub generator_part: HermitianOperator,
    pub basis: GammaBasis,
    /// Some outcome had zero overlap with the state.
    pub degenerate: bool,
}

impl OperatorSplit {
    /// `A` written in the γ basis.
    pub fn gamma_matrix(&self, a: &CMatrix) -> CMatrix {
        self.basis.vectors.adjoint() * a * &self.basis.vectors
    }
}

/// Like [`split_operator`] but reports zero-overlap outcomes only through
/// [`OperatorSplit::degenerate`].
pub fn split_operator_flagged(
    state: &QuantumState,
    measurement: &Measurement,
    a: &HermitianOperator,
) -> Result<OperatorSplit> {
    let basis = gamma_basis(state, measurement)?;
    if a.dim() != basis.vectors.nrows() {
        return Err(Error::Dimension {
            what: "generator",
            expected: basis.vectors.nrows(),
            found: a.dim(),
        });
    }
    let g = &basis.vectors;
    let in_gamma = g.adjoint() * a.matrix() * g;
    let sym = in_gamma.map(|z| c(z.re, 0.0));
    let anti = in_gamma.map(|z| c(0.0, z.im));
    let symmetric_part = HermitianOperator::new_unchecked(g * sym * g.adjoint());
    let generator_part = HermitianOperator::new_unchecked(g * anti * g.adjoint());
    Ok(OperatorSplit {
        symmetric_part,
        generator_part,
        degenerate: !basis.degenerate.is_empty(),
        basis,
    })
}

/// `A = S + K` with `S` real-symmetric and `K` imaginary-antisymmetric in the
/// γ basis. Zero-overlap outcomes yield [`Error::DegenerateOverlap`], which
/// still carries the split computed with phase 1 there.
pub fn split_operator(state: &QuantumState, measurement: &Measurement, a: &HermitianOperator) -> Result<OperatorSplit> {
    let split = split_operator_flagged(state, measurement, a)?;
    if split.degenerate {
        return Err(Error::DegenerateOverlap {
            outcomes: split.basis.degenerate.clone(),
            split: Box::new(split),
        });
    }
    Ok(split)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SubspaceDimensions {
    pub generators: usize,
    pub observables: usize,
}

/// Sizes of the antisymmetric (phase-visible) and symmetric (phase-invisible)
/// operator subspaces.
pub fn subspace_dimensions(d: usize) -> Result<SubspaceDimensions> {
    if d == 0 {
        return Err(Error::Parameter("dimension must be at least 1".into()));
    }
    Ok(SubspaceDimensions {
        generators: d * (d - 1) / 2,
        observables: d * (d + 1) / 2,
    })
}

const INSENSITIVE_TOL: f64 = 1e-9;

/// True iff no outcome of the measurement responds to phase shifts generated
/// by `A`: every defined weak value is real and every zero-probability outcome
/// has vanishing `⟨m|(A−⟨A⟩)|ψ⟩`.
pub fn is_measurement_insensitive(state: &QuantumState, measurement: &Measurement, a: &HermitianOperator) -> Result<bool> {
    let (psi, basis) = crate::weak::pure_projective(state, measurement, "measurement insensitivity")?;
    let profile = weak_value_profile(state, measurement, a)?;
    let shifted = a.shifted(profile.mean_a).matrix() * psi;
    Ok(profile.outcomes.iter().all(|o| match o.weak_value {
        Some(w) => w.im.abs() <= INSENSITIVE_TOL,
        None => basis.column(o.index).dotc(&shifted).norm() <= INSENSITIVE_TOL,
    }))
}

/// `i(|γ_j⟩⟨γ_k| − |γ_k⟩⟨γ_j|)` for `j < k`.
pub fn antisymmetric_basis(basis: &GammaBasis) -> Vec<HermitianOperator> {
    let g = &basis.vectors;
    let d = g.ncols();
    let mut out = Vec::with_capacity(d * (d.saturating_sub(1)) / 2);
    for j in 0..d {
        for k in j + 1..d {
            let (gj, gk) = (g.column(j), g.column(k));
            let m = (gj * gk.adjoint() - gk * gj.adjoint()) * C64::new(0.0, 1.0);
            out.push(HermitianOperator::new_unchecked(m));
        }
    }
    out
}

/// `|γ_j⟩⟨γ_k| + |γ_k⟩⟨γ_j|` for `j < k`, and `|γ_j⟩⟨γ_j|`.
pub fn symmetric_basis(basis: &GammaBasis) -> Vec<HermitianOperator> {
    let g = &basis.vectors;
    let d = g.ncols();
    let mut out = Vec::with_capacity(d * (d + 1) / 2);
    for j in 0..d {
        for k in j..d {
            let (gj, gk) = (g.column(j), g.column(k));
            let m = if j == k {
                gj * gj.adjoint()
            } else {
                gj * gk.adjoint() + gk * gj.adjoint()
            };
            out.push(HermitianOperator::new_unchecked(m));
        }
    }
    out
}

/// Numerical rank of a set of operators viewed as vectors in `C^{d²}`.
pub fn operator_rank(ops: &[HermitianOperator]) -> usize {
    if ops.is_empty() {
        return 0;
    }
    let d2 = ops[0].dim() * ops[0].dim();
    let stacked = CMatrix::from_fn(d2, ops.len(), |r, col| ops[col].matrix()[r]);
    stacked.svd(false, false).rank(1e-9)
}

/// Fisher information carried by each part of a split, for reporting.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SplitFisher {
    pub full: f64,
    pub symmetric: f64,
    pub generator: f64,
}

pub fn split_fisher(state: &QuantumState, measurement: &Measurement, a: &HermitianOperator, split: &OperatorSplit) -> Result<SplitFisher> {
    let mode = ZeroProbMode::default_for(state);
    Ok(SplitFisher {
        full: fisher_information(state, measurement, a, mode)?,
        symmetric: fisher_information(state, measurement, &split.symmetric_part, mode)?,
        generator: fisher_information(state, measurement, &split.generator_part, mode)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs_diff, CVector};
    use crate::quantum::qubit::*;

    fn pure(v: CVector) -> QuantumState {
        QuantumState::Pure(v)
    }

    #[test]
    fn sigma_z_is_a_pure_generator_for_y_measurement() {
        // γ(y±) = e^{∓iπ/4}|y±⟩; in that basis σ_z/2 = [[0, i/2], [−i/2, 0]]
        let s = split_operator(&pure(plus()), &y_basis(), &half(sigma_z())).unwrap();
        let g = s.gamma_matrix(half(sigma_z()).matrix());
        assert!(g[(0, 0)].norm() < 1e-15 && g[(1, 1)].norm() < 1e-15);
        assert!((g[(0, 1)] - C64::new(0.0, 0.5)).norm() < 1e-15);
        assert!(max_abs_diff(s.generator_part.matrix(), half(sigma_z()).matrix()) < 1e-15);
        assert!(s.symmetric_part.matrix().norm() < 1e-15);
    }

    #[test]
    fn diagonal_generator_is_symmetric_for_z_measurement() {
        let s = split_operator(&pure(plus()), &z_basis(), &half(sigma_z())).unwrap();
        assert!(max_abs_diff(s.symmetric_part.matrix(), half(sigma_z()).matrix()) < 1e-15);
        assert!(s.generator_part.matrix().norm() < 1e-15);
    }

    #[test]
    fn identity_is_symmetric() {
        let s = split_operator(&pure(y_plus()), &x_basis(), &HermitianOperator::identity(2)).unwrap();
        assert!(max_abs_diff(s.symmetric_part.matrix(), &CMatrix::identity(2, 2)) < 1e-15);
        assert!(s.generator_part.matrix().norm() < 1e-15);
    }

    #[test]
    fn degenerate_overlap_still_returns_split() {
        let err = split_operator(&pure(plus()), &x_basis(), &half(sigma_z())).unwrap_err();
        let Error::DegenerateOverlap { outcomes, split } = err else { panic!("wrong error") };
        assert_eq!(outcomes, vec![1]);
        let sum = split.symmetric_part.matrix() + split.generator_part.matrix();
        assert!(max_abs_diff(&sum, half(sigma_z()).matrix()) < 1e-15);
    }

    #[test]
    fn dimension_counts() {
        let d2 = subspace_dimensions(2).unwrap();
        assert_eq!((d2.generators, d2.observables), (1, 3));
        let d1 = subspace_dimensions(1).unwrap();
        assert_eq!((d1.generators, d1.observables), (0, 1));
        let d5 = subspace_dimensions(5).unwrap();
        assert_eq!((d5.generators, d5.observables), (10, 15));
        assert!(subspace_dimensions(0).is_err());
    }

    #[test]
    fn insensitivity_examples() {
        let s = split_operator(&pure(plus()), &y_basis(), &half(sigma_x())).unwrap();
        assert!(is_measurement_insensitive(&pure(plus()), &y_basis(), &s.symmetric_part).unwrap());
        assert!(!is_measurement_insensitive(&pure(plus()), &y_basis(), &half(sigma_z())).unwrap());
        assert!(is_measurement_insensitive(&pure(plus()), &y_basis(), &HermitianOperator::identity(2)).unwrap());
        // zero-probability outcome with a nonzero limiting term is sensitive
        assert!(!is_measurement_insensitive(&pure(plus()), &x_basis(), &half(sigma_z())).unwrap());
    }
}
