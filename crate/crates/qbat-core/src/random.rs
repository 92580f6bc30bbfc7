//! Seeded random sampling of states and unitaries.
//!
//! All randomness in this crate flows through `ChaCha12` generators seeded
//! explicitly, so every sweep, optimization, and verification run is
//! reproducible bit-for-bit from its seed. Independent streams are derived
//! from a base seed with [`derive_seed`], which lets parallel workers draw
//! from disjoint generators without sharing state.

use crate::linalg;
use crate::state::{DensityOperator, StateVector};
use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

/// Deterministic, well-mixed child seed for stream `index` of `base`.
///
/// SplitMix64 finalizer over `base + (index+1)·golden-ratio`; nearby indices
/// give statistically unrelated streams.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    let mut z = base.wrapping_add((index.wrapping_add(1)).wrapping_mul(0x9e3779b97f4a7c15));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Seeded generator.
pub fn rng_from(seed: u64) -> ChaCha12Rng {
    use rand::SeedableRng;
    ChaCha12Rng::seed_from_u64(seed)
}

/// Haar-random pure state on a single subsystem of dimension `d`.
pub fn random_pure_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> StateVector {
    let v = DVector::from_fn(d, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let norm = v.norm();
    StateVector::from_dvector(vec![d], v.unscale(norm))
        .expect("normalized Gaussian vector is a valid state")
}

/// Random density operator of the given rank with Haar-random eigenbasis.
///
/// Eigenvalues are a uniform draw on the simplex, floored away from zero so
/// the requested rank is numerically unambiguous.
pub fn random_density<R: Rng + ?Sized>(d: usize, rank: usize, rng: &mut R) -> DensityOperator {
    assert!(rank >= 1 && rank <= d, "rank must be in 1..=d");
    let mut weights: Vec<f64> = (0..rank).map(|_| 0.05 + rng.random::<f64>()).collect();
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    let basis = linalg::haar_unitary(d, rng);
    let mut mat = DMatrix::<Complex64>::zeros(d, d);
    for (k, &w) in weights.iter().enumerate() {
        let col = basis.column(k);
        mat += (col * col.adjoint()).scale(w);
    }
    DensityOperator::new(vec![d], mat).expect("spectral mixture is a valid state")
}

/// Haar-random unitary matrix.
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DMatrix<Complex64> {
    linalg::haar_unitary(d, rng)
}

/// Random state of prescribed purity: a Haar-random pure state mixed with
/// the maximally mixed state.
///
/// For ρ = w·|ψ⟩⟨ψ| + (1 − w)·I/d the purity is Tr ρ² = w² + (1 − w²)/d,
/// which is inverted for the mixing weight; `purity` must lie in [1/d, 1].
pub fn random_fixed_purity<R: Rng + ?Sized>(
    d: usize,
    purity: f64,
    rng: &mut R,
) -> Result<DensityOperator> {
    let floor = 1.0 / d as f64;
    if !(floor - 1e-12..=1.0 + 1e-12).contains(&purity) {
        return Err(Error::InvalidValue(format!(
            "purity {purity} outside [{floor}, 1] for dimension {d}"
        )));
    }
    let w = ((purity - floor).max(0.0) / (1.0 - floor)).sqrt().min(1.0);
    let psi = random_pure_state(d, rng);
    let mut mat = psi.to_density().matrix().scale(w);
    let uniform = (1.0 - w) / d as f64;
    for i in 0..d {
        mat[(i, i)] += Complex64::from(uniform);
    }
    DensityOperator::new(vec![d], mat)
}
