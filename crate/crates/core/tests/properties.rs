mod common;

use common::{born_rule_fisher, random_case, variance};
use proptest::prelude::*;
use weakval_core::linalg::{max_abs_diff, CMatrix, C64};
use weakval_core::metrology::*;
use weakval_core::quantum::{evolve, outcome_probabilities, validate_state, HermitianOperator, Measurement, QuantumState, Tolerances};
use weakval_core::random::{haar_pure_state, haar_unitary, rng_from_seed};
use weakval_core::split::*;
use weakval_core::weak::*;

fn config() -> ProptestConfig {
    ProptestConfig::with_cases(64)
}

fn conjugated(state: &QuantumState, v: &CMatrix) -> QuantumState {
    match state {
        QuantumState::Pure(psi) => QuantumState::Pure(v * psi),
        QuantumState::Mixed(rho) => QuantumState::Mixed(v * rho * v.adjoint()),
    }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn probabilities_sum_to_one(seed in any::<u64>(), d in 2usize..=6, mixed: bool, povm: bool, phi in -3.0f64..3.0) {
        let c = random_case(seed, d, mixed, povm);
        let p = outcome_probabilities(&c.state, &c.measurement, &c.generator, phi).unwrap();
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(p.iter().all(|&x| (0.0..=1.0).contains(&x)));
    }

    #[test]
    fn evolution_preserves_states(seed in any::<u64>(), d in 1usize..=6, mixed: bool, phi in -6.0f64..6.0) {
        let c = random_case(seed, d, mixed, false);
        let evolved = evolve(&c.state, &c.generator, phi).unwrap();
        prop_assert!(validate_state(&evolved, &Tolerances::default()).passed());
        let back = evolve(&evolved, &c.generator, -phi).unwrap();
        prop_assert!(max_abs_diff(&back.density_matrix(), &c.state.density_matrix()) < 1e-12);
    }

    #[test]
    fn unitary_covariance(seed in any::<u64>(), d in 2usize..=5, mixed: bool, povm: bool, phi in -2.0f64..2.0) {
        let c = random_case(seed, d, mixed, povm);
        let v = haar_unitary(d, &mut rng_from_seed(seed ^ 0x5eed));
        let a2 = HermitianOperator::new_unchecked(&v * c.generator.matrix() * v.adjoint());
        let p1 = outcome_probabilities(&c.state, &c.measurement, &c.generator, phi).unwrap();
        let p2 = outcome_probabilities(&conjugated(&c.state, &v), &c.measurement.transformed(&v), &a2, phi).unwrap();
        for (x, y) in p1.iter().zip(&p2) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn weak_values_average_to_the_mean(seed in any::<u64>(), d in 1usize..=6, mixed: bool, povm: bool) {
        let c = random_case(seed, d, mixed, povm);
        let profile = weak_value_profile(&c.state, &c.measurement, &c.generator).unwrap();
        prop_assert!(profile.mean_rule_residual() < 1e-12);
        prop_assert!(profile.probability_residual() < 1e-12);
        let weighted: C64 = profile.outcomes.iter().filter_map(|o| o.weak_value.map(|w| w * o.probability)).sum();
        prop_assert!((weighted - C64::new(profile.mean_a, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn fisher_matches_born_rule_derivative(seed in any::<u64>(), d in 2usize..=6, mixed: bool, povm: bool) {
        let c = random_case(seed, d, mixed, povm);
        let f = fisher_information(&c.state, &c.measurement, &c.generator, ZeroProbMode::Exclude).unwrap();
        let oracle = born_rule_fisher(&c.state, &c.measurement, &c.generator);
        prop_assert!((f - oracle).abs() < 1e-10 * (1.0 + oracle));
    }

    #[test]
    fn fisher_ignores_shifts_of_the_generator(seed in any::<u64>(), d in 2usize..=6, mixed: bool, povm: bool, shift in -5.0f64..5.0) {
        let c = random_case(seed, d, mixed, povm);
        let mode = ZeroProbMode::default_for(&c.state);
        let f = fisher_information(&c.state, &c.measurement, &c.generator, mode).unwrap();
        let g = fisher_information(&c.state, &c.measurement, &c.generator.shifted(-shift), mode).unwrap();
        prop_assert!((f - g).abs() < 1e-9 * (1.0 + f));
    }

    #[test]
    fn mixing_with_noise_never_helps(seed in any::<u64>(), d in 2usize..=5, povm: bool, v in 0.0f64..1.0) {
        let c = random_case(seed, d, false, povm);
        let f_pure = fisher_information(&c.state, &c.measurement, &c.generator, ZeroProbMode::Exclude).unwrap();
        let noisy = c.state.depolarized(v);
        let f_noisy = fisher_information(&noisy, &c.measurement, &c.generator, ZeroProbMode::Exclude).unwrap();
        prop_assert!(f_noisy <= v * f_pure + 1e-9);
    }

    #[test]
    fn weak_variance_identity_holds(seed in any::<u64>(), d in 1usize..=8) {
        let c = random_case(seed, d, false, false);
        let pair = weak_variance_identity(&c.state, &c.measurement, &c.generator).unwrap();
        prop_assert!(pair.residual() < 1e-10);
        prop_assert!((pair.rhs - variance(&c.state, &c.generator)).abs() < 1e-10);
    }

    #[test]
    fn sensitivity_decomposition_holds(seed in any::<u64>(), d in 1usize..=8) {
        let c = random_case(seed, d, false, false);
        let dec = pure_sensitivity_decomposition(&c.state, &c.measurement, &c.generator, Strictness::Strict).unwrap();
        prop_assert!(dec.residual() < 1e-9);
    }

    #[test]
    fn time_symmetric_bound_holds(seed in any::<u64>(), d in 2usize..=6, mixed: bool, povm: bool) {
        let c = random_case(seed, d, mixed, povm);
        let report = bound_check(&c.state, &c.measurement, &c.generator, None, Strictness::Strict).unwrap();
        prop_assert!(report.bound_slack >= -1e-9);
        prop_assert!(report.fisher <= report.four_var_in + 1e-9);
        let est = estimate_uncertainty(&c.state, &c.measurement, &c.generator, Strictness::Strict).unwrap();
        prop_assert!((est - report.est_variance).abs() < 1e-12);
    }

    #[test]
    fn cauchy_schwarz_gap_is_nonnegative(seed in any::<u64>(), d in 2usize..=6, mixed: bool, povm: bool) {
        let c = random_case(seed, d, mixed, povm);
        let g = cauchy_schwarz_gap(&c.state, &c.measurement, &c.generator).unwrap();
        prop_assert!(g.gap >= -1e-9);
        if !mixed && !povm {
            prop_assert!(g.gap.abs() < 1e-9);
        }
    }

    #[test]
    fn gamma_expansion_reproduces_weak_values(seed in any::<u64>(), d in 1usize..=6) {
        let c = random_case(seed, d, false, false);
        for m in 0..d {
            let direct = weak_value(&c.state, &c.measurement.effect(m).unwrap(), &c.generator).unwrap().unwrap();
            let via = weak_value_via_gamma(&c.state, &c.measurement, &c.generator, m).unwrap();
            prop_assert!((direct - via.value).norm() < 1e-10 * (1.0 + direct.norm()));
            prop_assert!((via.symmetric_part.re - direct.re).abs() < 1e-10 * (1.0 + direct.norm()));
            prop_assert!((via.antisymmetric_part.im - direct.im).abs() < 1e-10 * (1.0 + direct.norm()));
        }
    }

    #[test]
    fn split_separates_real_and_imaginary_weak_values(seed in any::<u64>(), d in 2usize..=4) {
        let c = random_case(seed, d, false, false);
        let split = split_operator(&c.state, &c.measurement, &c.generator).unwrap();
        let sum = split.symmetric_part.matrix() + split.generator_part.matrix();
        prop_assert!(max_abs_diff(&sum, c.generator.matrix()) < 1e-12);
        let f = split_fisher(&c.state, &c.measurement, &c.generator, &split).unwrap();
        prop_assert!(f.symmetric < 1e-9);
        prop_assert!((f.full - f.generator).abs() < 1e-9);
        prop_assert!(is_measurement_insensitive(&c.state, &c.measurement, &split.symmetric_part).unwrap());
        let dims = subspace_dimensions(d).unwrap();
        prop_assert_eq!(operator_rank(&antisymmetric_basis(&split.basis)), dims.generators);
        prop_assert_eq!(operator_rank(&symmetric_basis(&split.basis)), dims.observables);
        let mut all = antisymmetric_basis(&split.basis);
        all.extend(symmetric_basis(&split.basis));
        prop_assert_eq!(operator_rank(&all), d * d);
    }

    #[test]
    fn log_derivative_matches_finite_difference(seed in any::<u64>(), d in 2usize..=5, mixed: bool, povm: bool) {
        let c = random_case(seed, d, mixed, povm);
        for m in 0..c.measurement.outcome_count() {
            let exact = log_derivative(&c.state, &c.measurement, &c.generator, m).unwrap();
            let fd = log_derivative_fd(&c.state, &c.measurement, &c.generator, m, 1e-5).unwrap();
            prop_assert!((exact - fd).abs() < 1e-6 * (1.0 + exact.abs()));
        }
    }
}

#[test]
fn haar_states_have_uniform_overlaps() {
    let mut rng = rng_from_seed(2024);
    for d in [2usize, 3, 5] {
        let n = 20_000;
        let mean: f64 = (0..n).map(|_| haar_pure_state(d, &mut rng)[0].norm_sqr()).sum::<f64>() / n as f64;
        // Var|⟨0|ψ⟩|² = (d−1)/(d²(d+1))
        let sd = ((d - 1) as f64 / ((d * d * (d + 1)) as f64) / n as f64).sqrt();
        assert!((mean - 1.0 / d as f64).abs() < 4.0 * sd, "d={d}: {mean}");
    }
}

#[test]
fn exact_zero_probability_outcome_uses_limit() {
    use weakval_core::quantum::qubit::*;
    let state = QuantumState::Pure(plus());
    let a = half(sigma_z());
    let dec = pure_sensitivity_decomposition(&state, &x_basis(), &a, Strictness::Strict).unwrap();
    assert!((dec.fisher - 1.0).abs() < 1e-12 && dec.residual() < 1e-12);
    assert_eq!(fisher_information(&state, &x_basis(), &a, ZeroProbMode::Exclude).unwrap(), 0.0);
    let povm = Measurement::Povm(common::effects(&x_basis()));
    let r = bound_check(&state, &povm, &a, Some(ZeroProbMode::LimitCorrect), Strictness::Strict).unwrap();
    assert!((r.fisher - 1.0).abs() < 1e-12);
}
