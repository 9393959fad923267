#![allow(dead_code)]

use weakval_core::linalg::{CMatrix, C64};
use weakval_core::quantum::{HermitianOperator, Measurement, QuantumState};
use weakval_core::random::{haar_pure_state, haar_unitary, hs_density_matrix, noisy_povm, random_hermitian, substream};

pub struct Case {
    pub state: QuantumState,
    pub measurement: Measurement,
    pub generator: HermitianOperator,
}

/// One random scenario per `(seed, d)`, drawn from a single stream.
pub fn random_case(seed: u64, d: usize, mixed: bool, povm: bool) -> Case {
    let mut rng = substream(seed, d as u64);
    let state = if mixed {
        let rank = 1 + (seed as usize % d);
        QuantumState::Mixed(hs_density_matrix(d, rank.max(2).min(d), &mut rng).unwrap())
    } else {
        QuantumState::Pure(haar_pure_state(d, &mut rng))
    };
    let measurement = if povm {
        Measurement::Povm(noisy_povm(d, 0.3 + 0.6 * ((seed % 7) as f64 / 6.0), &mut rng).unwrap())
    } else {
        Measurement::Basis(haar_unitary(d, &mut rng))
    };
    Case {
        state,
        measurement,
        generator: random_hermitian(d, &mut rng),
    }
}

pub fn effects(m: &Measurement) -> Vec<CMatrix> {
    m.effects().iter().map(|e| e.operator()).collect()
}

/// `F = Σ (dp/dφ)²/p` with `dp/dφ = Tr{E·(−i)[A, ρ]}` from the Born rule.
pub fn born_rule_fisher(state: &QuantumState, m: &Measurement, a: &HermitianOperator) -> f64 {
    let rho = state.density_matrix();
    let a = a.matrix();
    let drho = (a * &rho - &rho * a) * C64::new(0.0, -1.0);
    effects(m)
        .iter()
        .map(|e| {
            let p = (e * &rho).trace().re;
            let dp = (e * &drho).trace().re;
            if p >= 1e-12 {
                dp * dp / p
            } else {
                0.0
            }
        })
        .sum()
}

pub fn variance(state: &QuantumState, a: &HermitianOperator) -> f64 {
    let rho = state.density_matrix();
    let a = a.matrix();
    let mean = (a * &rho).trace().re;
    (a * a * &rho).trace().re - mean * mean
}
