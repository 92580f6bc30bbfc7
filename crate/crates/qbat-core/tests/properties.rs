//! Randomized invariants: structural identities that must hold for every
//! well-formed input, checked over seeded instances.
//!
//! Optimized quantities appear only on the side of an inequality where an
//! unconverged optimizer cannot produce a false failure: search results are
//! achievable values, hence lower bounds for retrieval maxima and upper
//! bounds for entanglement minima.

use proptest::prelude::*;
use qbat_core::channel::{EnergyPreservingUnitary, IsometricExtension};
use qbat_core::entangle::{self, EofSearchConfig};
use qbat_core::measure::{condition_strong, condition_weak, Povm};
use qbat_core::random::{derive_seed, random_density, random_pure_state, random_unitary, rng_from};
use qbat_core::retrieval::{self, OptimizerConfig};
use qbat_core::state::{DensityOperator, StateVector};
use qbat_core::thermal::{self, Hamiltonian, InverseTemperature};
use rand::Rng;

fn density(seed: u64, d: usize, rank: usize) -> DensityOperator {
    random_density(d, rank, &mut rng_from(seed))
}

fn pure(seed: u64, d: usize) -> StateVector {
    random_pure_state(d, &mut rng_from(seed))
}

/// Random qubit-family extension with β in [0.2, 5].
fn qubit_ext(seed: u64) -> IsometricExtension {
    let mut rng = rng_from(seed);
    let alpha = num_complex::Complex64::from_polar(
        rng.random_range(0.0..=1.0),
        rng.random_range(0.0..std::f64::consts::TAU),
    );
    let gphase: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let beta = InverseTemperature::finite(rng.random_range(0.2..5.0)).unwrap();
    IsometricExtension::qubit_family(alpha, gphase, beta).unwrap()
}

/// Random block-Haar extension on equal system/bath Hamiltonians.
fn block_ext(seed: u64, energies: &[f64]) -> IsometricExtension {
    let mut rng = rng_from(seed);
    let h = Hamiltonian::new(energies.to_vec()).unwrap();
    let u = EnergyPreservingUnitary::random(h.clone(), h, seed).unwrap();
    let beta = InverseTemperature::finite(rng.random_range(0.2..5.0)).unwrap();
    IsometricExtension::new(u, beta).unwrap()
}

fn max_abs_diff(a: &DensityOperator, b: &DensityOperator) -> f64 {
    a.matrix()
        .iter()
        .zip(b.matrix().iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tensor_then_partial_trace_is_identity(
        seed in any::<u64>(),
        d1 in 2usize..=3,
        d2 in 2usize..=3,
    ) {
        let rho = density(derive_seed(seed, 1), d1, d1);
        let sig = density(derive_seed(seed, 2), d2, d2);
        let joint = rho.tensor(&sig);
        let left = joint.partial_trace(&[0]).unwrap();
        prop_assert!(max_abs_diff(&left, &rho) <= 1e-10);
        let right = joint.partial_trace(&[1]).unwrap();
        prop_assert!(max_abs_diff(&right, &sig) <= 1e-10);
    }

    #[test]
    fn entropy_is_additive_over_tensor(
        seed in any::<u64>(),
        d1 in 2usize..=3,
        d2 in 2usize..=3,
    ) {
        let rho = density(derive_seed(seed, 1), d1, d1);
        let sig = density(derive_seed(seed, 2), d2, d2);
        let joint = rho.tensor(&sig);
        prop_assert!(
            (joint.vn_entropy() - rho.vn_entropy() - sig.vn_entropy()).abs() <= 1e-8
        );
    }

    #[test]
    fn purify_then_trace_recovers_state(
        seed in any::<u64>(),
        d in 2usize..=4,
        rank in 1usize..=4,
    ) {
        let rho = density(seed, d, rank.min(d));
        let psi = rho.purify();
        let back = psi.reduced(&[0]).unwrap();
        prop_assert!(max_abs_diff(&back, &rho) <= 1e-10);
    }

    #[test]
    fn trace_distance_satisfies_triangle_inequality(
        seed in any::<u64>(),
        d in 2usize..=4,
    ) {
        let a = density(derive_seed(seed, 1), d, d);
        let b = density(derive_seed(seed, 2), d, d);
        let c = density(derive_seed(seed, 3), d, d);
        let ac = a.trace_distance(&c).unwrap();
        let ab = a.trace_distance(&b).unwrap();
        let bc = b.trace_distance(&c).unwrap();
        prop_assert!(ac <= ab + bc + 1e-10);
    }

    #[test]
    fn thermal_state_minimizes_free_energy(
        seed in any::<u64>(),
        d in 2usize..=3,
        beta_v in 0.2f64..5.0,
    ) {
        let h = if d == 2 {
            Hamiltonian::qubit()
        } else {
            Hamiltonian::new(vec![0.0, 0.7, 1.9]).unwrap()
        };
        let beta = InverseTemperature::finite(beta_v).unwrap();
        let rho = density(seed, d, d);
        let f = thermal::free_energy_raw(&rho, &h, beta).unwrap();
        prop_assert!(f >= thermal::thermal_free_energy_raw(&h, beta) - 1e-10);
    }

    #[test]
    fn purified_thermal_marginals_are_thermal(
        beta_v in 0.2f64..5.0,
        e1 in 0.1f64..2.0,
        e2 in 0.0f64..1.5,
    ) {
        let h = Hamiltonian::new(vec![0.0, e1, e1 + e2]).unwrap();
        let beta = InverseTemperature::finite(beta_v).unwrap();
        let tau = thermal::thermal_state(&h, beta);
        let psi = thermal::purified_thermal(&h, beta).unwrap();
        for side in [0usize, 1] {
            let marginal = psi.reduced(&[side]).unwrap();
            prop_assert!(max_abs_diff(&marginal, &tau) <= 1e-10);
        }
    }

    #[test]
    fn eof_pure_agrees_across_complementary_cuts(
        seed in any::<u64>(),
        d2 in 2usize..=3,
    ) {
        let flat = pure(seed, 2 * d2);
        let psi = StateVector::new(vec![2, d2], flat.amplitudes().iter().copied().collect())
            .unwrap();
        let left = entangle::eof_pure(&psi, &[0]).unwrap().value;
        let right = entangle::eof_pure(&psi, &[1]).unwrap().value;
        prop_assert!((left - right).abs() <= 1e-10);
    }

    #[test]
    fn eof_cannot_grow_when_discarding_part_of_one_side(
        seed in any::<u64>(),
    ) {
        // Pure |Ψ⟩ on s|RR′: the formation entanglement of the sR marginal
        // never exceeds the s|RR′ entanglement entropy.
        let flat = pure(seed, 8);
        let psi = StateVector::new(vec![2, 2, 2], flat.amplitudes().iter().copied().collect())
            .unwrap();
        let whole = entangle::eof_pure(&psi, &[0]).unwrap().value;
        let part = entangle::eof_wootters(&psi.reduced(&[0, 1]).unwrap())
            .unwrap()
            .value;
        prop_assert!(part <= whole + 1e-3);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn extensions_fix_the_thermal_state(
        seed in any::<u64>(),
        kind in 0usize..=2,
    ) {
        let ext = match kind {
            0 => qubit_ext(seed),
            1 => block_ext(seed, &[0.0, 1.0]),
            _ => block_ext(seed, &[0.0, 1.0, 1.0]),
        };
        let tau = thermal::thermal_state(ext.system_hamiltonian(), ext.beta());
        let out = ext.channel_output(&tau).unwrap();
        prop_assert!(out.trace_distance(&tau).unwrap() <= 1e-9);
    }

    #[test]
    fn channel_never_raises_free_energy(
        seed in any::<u64>(),
        kind in 0usize..=1,
    ) {
        let ext = if kind == 0 {
            qubit_ext(seed)
        } else {
            block_ext(seed, &[0.0, 1.0])
        };
        let d = ext.system_hamiltonian().dim();
        let rho = density(derive_seed(seed, 9), d, d);
        let out = ext.channel_output(&rho).unwrap();
        let h = ext.system_hamiltonian();
        let before = thermal::free_energy_raw(&rho, h, ext.beta()).unwrap();
        let after = thermal::free_energy_raw(&out, h, ext.beta()).unwrap();
        prop_assert!(after <= before + 1e-9);
    }

    #[test]
    fn global_interaction_conserves_system_plus_bath_energy(
        seed in any::<u64>(),
    ) {
        let ext = qubit_ext(seed);
        let hs = ext.system_hamiltonian();
        let hb = ext.unitary().bath_hamiltonian();
        let rho = density(derive_seed(seed, 9), 2, 2);
        let tau = thermal::thermal_state(hb, ext.beta());
        let before =
            thermal::energy(&rho, hs).unwrap() + thermal::energy(&tau, hb).unwrap();
        let sigma = ext.apply(&rho).unwrap();
        let after = thermal::energy(&sigma.partial_trace(&[0]).unwrap(), hs).unwrap()
            + thermal::energy(&sigma.partial_trace(&[1]).unwrap(), hb).unwrap();
        prop_assert!((before - after).abs() <= 1e-9);
    }

    #[test]
    fn extensions_preserve_purity(
        seed in any::<u64>(),
    ) {
        let ext = qubit_ext(seed);
        let psi = pure(derive_seed(seed, 9), 2);
        let sigma = ext.apply(&psi.to_density()).unwrap();
        let eigs = sigma.eigenvalues();
        let top = eigs.iter().copied().fold(0.0f64, f64::max);
        prop_assert!(top >= 1.0 - 1e-9);
    }

    #[test]
    fn conditioning_obeys_no_signaling_and_normalization(
        seed in any::<u64>(),
        mixed in any::<bool>(),
    ) {
        let ext = qubit_ext(seed);
        let rho = if mixed {
            density(derive_seed(seed, 9), 2, 2)
        } else {
            pure(derive_seed(seed, 9), 2).to_density()
        };
        let sigma = ext.apply(&rho).unwrap();
        let sigma_s = sigma.partial_trace(&[0]).unwrap();
        let ub = random_unitary(2, &mut rng_from(derive_seed(seed, 10)));
        let ur = random_unitary(2, &mut rng_from(derive_seed(seed, 11)));
        let povm_b = Povm::projective(&ub).unwrap();
        let povm_r = Povm::projective(&ur).unwrap();

        for ensemble in [
            condition_weak(&sigma, &povm_b).unwrap(),
            condition_strong(&sigma, &povm_b, &povm_r).unwrap(),
        ] {
            prop_assert!((ensemble.total_probability() - 1.0).abs() <= 1e-9);
            prop_assert!(ensemble
                .outcomes()
                .iter()
                .all(|o| o.probability >= -1e-12));
            let avg = ensemble.average_state().unwrap();
            prop_assert!(avg.trace_distance(&sigma_s).unwrap() <= 1e-9);
        }
    }

    #[test]
    fn trivial_reference_reduces_strong_to_weak(
        seed in any::<u64>(),
    ) {
        let ext = qubit_ext(seed);
        let rho = density(derive_seed(seed, 9), 2, 2);
        let sigma = ext.apply(&rho).unwrap();
        let ub = random_unitary(2, &mut rng_from(derive_seed(seed, 10)));
        let povm_b = Povm::projective(&ub).unwrap();

        let weak = condition_weak(&sigma, &povm_b).unwrap();
        let strong = condition_strong(&sigma, &povm_b, &Povm::trivial(2)).unwrap();
        prop_assert_eq!(weak.len(), strong.len());
        for (w, s) in weak.outcomes().iter().zip(strong.outcomes()) {
            prop_assert!((w.probability - s.probability).abs() <= 1e-12);
            prop_assert!(max_abs_diff(&w.state, &s.state) <= 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn search_upper_bounds_wootters(
        seed in any::<u64>(),
        rank in 1usize..=4,
    ) {
        let rho = density(seed, 4, rank);
        let rho = DensityOperator::new(vec![2, 2], rho.matrix().clone()).unwrap();
        let exact = entangle::eof_wootters(&rho).unwrap().value;
        let cfg = EofSearchConfig { restarts: 2, max_iters: 300, ..EofSearchConfig::default() };
        let searched = entangle::eof_search(&rho, &[0], &cfg).unwrap().value;
        prop_assert!(exact <= searched + 1e-6);
    }

    #[test]
    fn weak_optimum_respects_the_entanglement_bound(
        seed in any::<u64>(),
        mixed in any::<bool>(),
    ) {
        let ext = qubit_ext(derive_seed(seed, 1));
        let rho = if mixed {
            density(derive_seed(seed, 2), 2, 2)
        } else {
            pure(derive_seed(seed, 2), 2).to_density()
        };
        let cfg = OptimizerConfig {
            restarts: 2,
            max_iters: 400,
            seed: derive_seed(seed, 3),
            ..OptimizerConfig::default()
        };
        let weak = retrieval::optimize_weak(&ext, &rho, &cfg).unwrap();
        let sigma = ext.apply(&rho).unwrap();
        let e = thermal::energy(&sigma.partial_trace(&[0]).unwrap(), ext.system_hamiltonian())
            .unwrap();
        let eof = entangle::eof_wootters(&sigma.partial_trace(&[0, 2]).unwrap())
            .unwrap()
            .value;
        prop_assert!(weak.value_raw <= e - ext.beta().recip() * eof + 1e-6);
    }

    #[test]
    fn optimized_chain_respects_ordering(
        seed in any::<u64>(),
        mixed in any::<bool>(),
    ) {
        let ext = qubit_ext(derive_seed(seed, 1));
        let rho = if mixed {
            density(derive_seed(seed, 2), 2, 2)
        } else {
            pure(derive_seed(seed, 2), 2).to_density()
        };
        let cfg = OptimizerConfig {
            restarts: 2,
            max_iters: 400,
            seed: derive_seed(seed, 3),
            ..OptimizerConfig::default()
        };
        let both = retrieval::optimize_both(&ext, &rho, &cfg).unwrap();
        let sigma_s = ext.channel_output(&rho).unwrap();
        let h = ext.system_hamiltonian();
        let f = thermal::free_energy_raw(&sigma_s, h, ext.beta()).unwrap();
        let e = thermal::energy(&sigma_s, h).unwrap();
        prop_assert!(both.weak.value_raw >= f - 1e-9);
        prop_assert!(both.strong.value_raw >= both.weak.value_raw - 1e-9);
        prop_assert!(both.strong.value_raw <= e + 1e-9);
        for res in [&both.weak, &both.strong] {
            prop_assert!(res
                .best_trajectory
                .windows(2)
                .all(|w| w[1] >= w[0]));
        }
    }
}
