//! Energy-preserving unitaries and isometric extensions of thermal channels.
//!
//! A thermal operation couples the system to a bath Gibbs state through a
//! unitary commuting with the total Hamiltonian H_s⊗I + I⊗H_b; such unitaries
//! are block-diagonal over the degenerate total-energy eigenspaces. Purifying
//! the bath with a reference R turns the channel into an isometry
//!
//! V|ψ⟩ = (U_sb ⊗ I_R)(|ψ⟩ ⊗ |φ_β⟩_bR),
//!
//! whose output lives on (s, b, R). Tracing out b and R recovers the channel;
//! keeping them enables assisted retrieval.
//!
//! The qubit family ([`IsometricExtension::qubit_family`]) is the
//! two-level-system interaction fixing |00⟩ and |11⟩ and rotating the
//! single-excitation sector by a complex amplitude α:
//!
//! |01⟩ ↦ α|01⟩ + γ|10⟩,  |10⟩ ↦ γ̄|01⟩ − ᾱ|10⟩,  |γ| = √(1−|α|²).
//!
//! α = 0 is a full swap (the channel discards the battery and emits the Gibbs
//! state); |α| = 1 leaves populations untouched and only dephases coherences.

use crate::error::{Error, Result};
use crate::linalg;
use crate::state::{DensityOperator, StateVector};
use crate::thermal::{purified_thermal, Hamiltonian, InverseTemperature};
use crate::tol;
use nalgebra::DMatrix;
use num_complex::Complex64;

/// One degenerate eigenspace of the total Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyBlock {
    /// Mean total energy of the block's levels.
    pub energy: f64,
    /// Flat indices i·d_b + j of the block, ascending.
    pub indices: Vec<usize>,
}

/// Degenerate total-energy blocks of H_s⊗I + I⊗H_b.
///
/// Joint levels are sorted by total energy and split wherever consecutive
/// energies differ by more than `tol`; the blocks partition all d_s·d_b
/// indices and their energies increase strictly across blocks.
pub fn degenerate_blocks(hs: &Hamiltonian, hb: &Hamiltonian, tol: f64) -> Vec<EnergyBlock> {
    let db = hb.dim();
    let mut levels: Vec<(f64, usize)> = Vec::with_capacity(hs.dim() * db);
    for (i, &es) in hs.energies().iter().enumerate() {
        for (j, &eb) in hb.energies().iter().enumerate() {
            levels.push((es + eb, i * db + j));
        }
    }
    levels.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut groups: Vec<Vec<(f64, usize)>> = Vec::new();
    for (e, idx) in levels {
        match groups.last_mut() {
            // Chain grouping: a new block starts at the first gap wider than
            // the tolerance.
            Some(g) if e - g.last().unwrap().0 <= tol => g.push((e, idx)),
            _ => groups.push(vec![(e, idx)]),
        }
    }
    groups
        .into_iter()
        .map(|g| {
            let energy = g.iter().map(|&(e, _)| e).sum::<f64>() / g.len() as f64;
            let mut indices: Vec<usize> = g.into_iter().map(|(_, i)| i).collect();
            indices.sort_unstable();
            EnergyBlock { energy, indices }
        })
        .collect()
}

/// Unitary on system⊗bath commuting with the total Hamiltonian.
#[derive(Debug, Clone)]
pub struct EnergyPreservingUnitary {
    matrix: DMatrix<Complex64>,
    hs: Hamiltonian,
    hb: Hamiltonian,
    blocks: Vec<EnergyBlock>,
}

impl EnergyPreservingUnitary {
    /// Validates and wraps a matrix: square of size d_s·d_b, unitary within
    /// [`tol::UNITARY`], supported on the degenerate blocks (off-block entries
    /// below [`tol::UNITARY`]), and commuting with the total Hamiltonian
    /// within [`tol::COMMUTATOR`].
    pub fn new(matrix: DMatrix<Complex64>, hs: Hamiltonian, hb: Hamiltonian) -> Result<Self> {
        let d = hs.dim() * hb.dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::DimensionMismatch(format!(
                "unitary is {}×{} but system⊗bath dimension is {d}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let dev = linalg::identity_deviation(&(matrix.adjoint() * &matrix));
        if dev > tol::UNITARY {
            return Err(Error::InvalidValue(format!(
                "matrix deviates from unitarity by {dev:.3e}"
            )));
        }
        let blocks = degenerate_blocks(&hs, &hb, tol::ENERGY_BLOCK);
        let mut block_of = vec![0usize; d];
        for (bi, b) in blocks.iter().enumerate() {
            for &i in &b.indices {
                block_of[i] = bi;
            }
        }
        let mut off_block: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                if block_of[i] != block_of[j] {
                    off_block = off_block.max(matrix[(i, j)].norm());
                }
            }
        }
        if off_block > tol::UNITARY {
            return Err(Error::InvalidValue(format!(
                "matrix couples distinct total-energy blocks (entry {off_block:.3e})"
            )));
        }
        // Off-block support already bounds the commutator, but check the
        // defining property directly as well.
        let db = hb.dim();
        let mut total = vec![0.0f64; d];
        for i in 0..hs.dim() {
            for j in 0..db {
                total[i * db + j] = hs.energies()[i] + hb.energies()[j];
            }
        }
        let mut comm: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                comm = comm.max((matrix[(i, j)] * (total[j] - total[i])).norm());
            }
        }
        if comm > tol::COMMUTATOR {
            return Err(Error::InvalidValue(format!(
                "matrix fails energy preservation (commutator entry {comm:.3e})"
            )));
        }
        Ok(Self {
            matrix,
            hs,
            hb,
            blocks,
        })
    }

    /// Haar-random block unitary: an independent Haar draw on each degenerate
    /// total-energy block, assembled and validated.
    pub fn random(hs: Hamiltonian, hb: Hamiltonian, seed: u64) -> Result<Self> {
        let d = hs.dim() * hb.dim();
        let blocks = degenerate_blocks(&hs, &hb, tol::ENERGY_BLOCK);
        let mut matrix = DMatrix::<Complex64>::zeros(d, d);
        let mut rng = crate::random::rng_from(seed);
        for b in &blocks {
            let n = b.indices.len();
            let u = linalg::haar_unitary(n, &mut rng);
            for (r, &ir) in b.indices.iter().enumerate() {
                for (c, &ic) in b.indices.iter().enumerate() {
                    matrix[(ir, ic)] = u[(r, c)];
                }
            }
        }
        Self::new(matrix, hs, hb)
    }

    /// The matrix on system⊗bath.
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// System Hamiltonian.
    pub fn system_hamiltonian(&self) -> &Hamiltonian {
        &self.hs
    }

    /// Bath Hamiltonian.
    pub fn bath_hamiltonian(&self) -> &Hamiltonian {
        &self.hb
    }

    /// Degenerate total-energy blocks supporting the unitary.
    pub fn blocks(&self) -> &[EnergyBlock] {
        &self.blocks
    }
}

/// Isometric extension V of a thermal channel, mapping the system into
/// (s, b, R) by acting with the coupling unitary on system ⊗ purified bath.
#[derive(Debug, Clone)]
pub struct IsometricExtension {
    unitary: EnergyPreservingUnitary,
    beta: InverseTemperature,
    bath: StateVector,
    /// V as a (d_s·d_b·d_R) × d_s matrix.
    matrix: DMatrix<Complex64>,
}

impl IsometricExtension {
    /// Builds the extension for a coupling unitary at inverse temperature β.
    ///
    /// Fails when the purified bath does not exist (infinite β with a
    /// degenerate bath ground level) or the assembled map is not an isometry
    /// within [`tol::UNITARY`].
    pub fn new(unitary: EnergyPreservingUnitary, beta: InverseTemperature) -> Result<Self> {
        let bath = purified_thermal(unitary.bath_hamiltonian(), beta)?;
        let ds = unitary.system_hamiltonian().dim();
        let db = unitary.bath_hamiltonian().dim();
        let big = ds * db * db;
        let mut matrix = DMatrix::<Complex64>::zeros(big, ds);
        // V e_i = (U⊗I_R)(e_i ⊗ φ); φ lives on (b, R).
        let u = unitary.matrix();
        let phi = bath.amplitudes();
        for i in 0..ds {
            for a in 0..ds {
                for m in 0..db {
                    for r in 0..db {
                        // ⟨a,m,r| (U⊗I) |i, b_in, r⟩ = U[(a m),(i b_in)] φ[b_in r]
                        let mut acc = Complex64::ZERO;
                        for b_in in 0..db {
                            acc += u[(a * db + m, i * db + b_in)] * phi[b_in * db + r];
                        }
                        matrix[((a * db + m) * db + r, i)] = acc;
                    }
                }
            }
        }
        let dev = linalg::identity_deviation(&(matrix.adjoint() * &matrix));
        if dev > tol::UNITARY {
            return Err(Error::InvalidValue(format!(
                "assembled map deviates from isometry by {dev:.3e}"
            )));
        }
        Ok(Self {
            unitary,
            beta,
            bath,
            matrix,
        })
    }

    /// The qubit interaction family: H_s = H_b = diag(0, 1); |00⟩ and |11⟩
    /// fixed; the single-excitation sector rotated by α and
    /// γ = √(1−|α|²)·e^{i·phase_gamma}.
    pub fn qubit_family(
        alpha: Complex64,
        phase_gamma: f64,
        beta: InverseTemperature,
    ) -> Result<Self> {
        let a2 = alpha.norm_sqr();
        if a2 > 1.0 + tol::UNITARY {
            return Err(Error::InvalidValue(format!(
                "|alpha| = {} exceeds 1",
                alpha.norm()
            )));
        }
        if !phase_gamma.is_finite() {
            return Err(Error::InvalidValue("phase_gamma must be finite".into()));
        }
        let gamma = Complex64::from_polar((1.0 - a2.min(1.0)).sqrt(), phase_gamma);
        let mut u = DMatrix::<Complex64>::zeros(4, 4);
        u[(0, 0)] = Complex64::ONE;
        u[(3, 3)] = Complex64::ONE;
        u[(1, 1)] = alpha;
        u[(2, 1)] = gamma;
        u[(1, 2)] = gamma.conj();
        u[(2, 2)] = -alpha.conj();
        let unitary = EnergyPreservingUnitary::new(u, Hamiltonian::qubit(), Hamiltonian::qubit())?;
        Self::new(unitary, beta)
    }

    /// The coupling unitary.
    pub fn unitary(&self) -> &EnergyPreservingUnitary {
        &self.unitary
    }

    /// Inverse temperature of the bath.
    pub fn beta(&self) -> InverseTemperature {
        self.beta
    }

    /// The purified bath state on (b, R).
    pub fn bath_purification(&self) -> &StateVector {
        &self.bath
    }

    /// V as a (d_s·d_b·d_R) × d_s matrix.
    pub fn isometry_matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// Output subsystem dimensions [d_s, d_b, d_R].
    pub fn output_dims(&self) -> Vec<usize> {
        let ds = self.unitary.system_hamiltonian().dim();
        let db = self.unitary.bath_hamiltonian().dim();
        vec![ds, db, db]
    }

    /// System Hamiltonian (levels of the battery).
    pub fn system_hamiltonian(&self) -> &Hamiltonian {
        self.unitary.system_hamiltonian()
    }

    /// V ρ V† on (s, b, R).
    pub fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        let ds = self.unitary.system_hamiltonian().dim();
        if rho.total_dim() != ds {
            return Err(Error::DimensionMismatch(format!(
                "battery dimension {} vs system dimension {ds}",
                rho.total_dim()
            )));
        }
        let out = &self.matrix * rho.matrix() * self.matrix.adjoint();
        DensityOperator::new(self.output_dims(), out)
    }

    /// V|ψ⟩ on (s, b, R).
    pub fn apply_pure(&self, psi: &StateVector) -> Result<StateVector> {
        let ds = self.unitary.system_hamiltonian().dim();
        if psi.total_dim() != ds {
            return Err(Error::DimensionMismatch(format!(
                "battery dimension {} vs system dimension {ds}",
                psi.total_dim()
            )));
        }
        StateVector::from_dvector(self.output_dims(), &self.matrix * psi.amplitudes())
    }

    /// Channel output Tr_{bR}(VρV†): the thermal operation applied to ρ.
    pub fn channel_output(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        self.apply(rho)?.partial_trace(&[0])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_density, rng_from};
    use crate::thermal::{energy, free_energy_raw, thermal_state};
    use approx::assert_abs_diff_eq;
    use nalgebra::DVector;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn qutrit_pair_block_sizes() {
        let h3 = Hamiltonian::new(vec![0.0, 1.0, 2.0]).unwrap();
        let blocks = degenerate_blocks(&h3, &h3, 1e-9);
        let sizes: Vec<usize> = blocks.iter().map(|b| b.indices.len()).collect();
        assert_eq!(sizes, vec![1, 2, 3, 2, 1]);
        let energies: Vec<f64> = blocks.iter().map(|b| b.energy).collect();
        assert_eq!(energies, vec![0.0, 1.0, 2.0, 3.0, 4.0]);
        // Partition property.
        let mut all: Vec<usize> = blocks.iter().flat_map(|b| b.indices.clone()).collect();
        all.sort_unstable();
        assert_eq!(all, (0..9).collect::<Vec<_>>());
    }

    #[test]
    fn qubit_blocks() {
        let blocks = degenerate_blocks(&Hamiltonian::qubit(), &Hamiltonian::qubit(), 1e-9);
        assert_eq!(blocks.len(), 3);
        assert_eq!(blocks[1].indices, vec![1, 2]);
    }

    #[test]
    fn near_degenerate_levels_merge_within_tolerance() {
        let hs = Hamiltonian::new(vec![0.0, 1.0]).unwrap();
        let hb = Hamiltonian::new(vec![0.0, 1.0 + 5e-10]).unwrap();
        let blocks = degenerate_blocks(&hs, &hb, 1e-9);
        assert_eq!(blocks.len(), 3);
        let wide = degenerate_blocks(&hs, &hb, 1e-12);
        assert_eq!(wide.len(), 4);
    }

    #[test]
    fn random_block_unitary_is_valid_and_seeded() {
        let h3 = Hamiltonian::new(vec![0.0, 1.0, 2.0]).unwrap();
        let u1 = EnergyPreservingUnitary::random(h3.clone(), h3.clone(), 5).unwrap();
        let u2 = EnergyPreservingUnitary::random(h3.clone(), h3.clone(), 5).unwrap();
        assert_eq!(u1.matrix(), u2.matrix());
        let u3 = EnergyPreservingUnitary::random(h3.clone(), h3, 6).unwrap();
        assert_ne!(u1.matrix(), u3.matrix());
    }

    #[test]
    fn rejects_energy_violating_unitary() {
        // A swap on a system⊗bath with mismatched spectra moves energy.
        let hs = Hamiltonian::qubit();
        let hb = Hamiltonian::new(vec![0.0, 2.0]).unwrap();
        let mut swap = DMatrix::<Complex64>::zeros(4, 4);
        swap[(0, 0)] = Complex64::ONE;
        swap[(1, 2)] = Complex64::ONE;
        swap[(2, 1)] = Complex64::ONE;
        swap[(3, 3)] = Complex64::ONE;
        assert!(matches!(
            EnergyPreservingUnitary::new(swap, hs, hb),
            Err(Error::InvalidValue(_))
        ));
    }

    #[test]
    fn rejects_non_unitary_matrix() {
        let m = DMatrix::<Complex64>::identity(4, 4).scale(0.5);
        assert!(matches!(
            EnergyPreservingUnitary::new(m, Hamiltonian::qubit(), Hamiltonian::qubit()),
            Err(Error::InvalidValue(_))
        ));
    }

    #[test]
    fn qubit_family_parameter_validation() {
        let beta = InverseTemperature::Finite(1.0);
        assert!(IsometricExtension::qubit_family(c(1.5, 0.0), 0.0, beta).is_err());
        assert!(IsometricExtension::qubit_family(c(0.5, 0.0), f64::NAN, beta).is_err());
        assert!(IsometricExtension::qubit_family(c(0.3, 0.4), 1.2, beta).is_ok());
    }

    #[test]
    fn isometry_property_across_family() {
        for (alpha, pg, beta) in [
            (c(1.0, 0.0), 0.0, 0.5),
            (c(0.0, 0.0), 0.0, 1.0),
            (c(0.3, 0.4), 0.7, 2.0),
            (c(0.0, 0.9), -1.1, 0.2),
        ] {
            let ext = IsometricExtension::qubit_family(alpha, pg, InverseTemperature::Finite(beta))
                .unwrap();
            let v = ext.isometry_matrix();
            assert!(linalg::identity_deviation(&(v.adjoint() * v)) < 1e-12);
        }
    }

    #[test]
    fn pure_battery_output_matches_hand_built_amplitudes() {
        // |α|=1, β=1, battery |+⟩: output is
        // Z^{−1/2}(|ξ⟩|00⟩ + e^{−1/2}|+⟩|11⟩) with ξ = (|0⟩−|1⟩)/√2.
        let beta = InverseTemperature::Finite(1.0);
        let ext = IsometricExtension::qubit_family(c(1.0, 0.0), 0.0, beta).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = StateVector::new(vec![2], vec![c(h, 0.0), c(h, 0.0)]).unwrap();
        let out = ext.apply_pure(&plus).unwrap();
        let inv_sqrt_z = 0.8550196364002437_f64; // 1/√(1+e^{−1})
        let decay = 0.5185956241330957_f64; // e^{−1/2}/√(1+e^{−1})
        let mut expect = DVector::<Complex64>::zeros(8);
        expect[0] = c(h * inv_sqrt_z, 0.0); // |0⟩|00⟩ from ξ
        expect[4] = c(-h * inv_sqrt_z, 0.0); // −|1⟩|00⟩ from ξ
        expect[3] = c(h * decay, 0.0); // |0⟩|11⟩
        expect[7] = c(h * decay, 0.0); // |1⟩|11⟩
        let overlap = out.amplitudes().dotc(&expect).norm();
        assert_abs_diff_eq!(overlap, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn full_swap_emits_gibbs_and_keeps_battery_in_bath_slot() {
        // α = 0: the channel replaces the battery with τ_β; the input moves
        // to the bath factor and (s, R) carry the purified Gibbs state.
        let beta = InverseTemperature::Finite(0.8);
        let ext = IsometricExtension::qubit_family(c(0.0, 0.0), 0.0, beta).unwrap();
        let rho = random_density(2, 2, &mut rng_from(3));
        let sigma = ext.apply(&rho).unwrap();
        let tau = thermal_state(&Hamiltonian::qubit(), beta);
        assert!(
            sigma
                .partial_trace(&[0])
                .unwrap()
                .trace_distance(&tau)
                .unwrap()
                < 1e-12
        );
        assert!(
            sigma
                .partial_trace(&[1])
                .unwrap()
                .trace_distance(&rho)
                .unwrap()
                < 1e-12
        );
    }

    #[test]
    fn gibbs_state_is_a_fixed_point() {
        let h3 = Hamiltonian::new(vec![0.0, 1.0, 2.0]).unwrap();
        for (seed, beta) in [(1u64, 0.4), (2, 1.0), (3, 3.3)] {
            let beta = InverseTemperature::Finite(beta);
            let u = EnergyPreservingUnitary::random(h3.clone(), h3.clone(), seed).unwrap();
            let ext = IsometricExtension::new(u, beta).unwrap();
            let tau = thermal_state(&h3, beta);
            let out = ext.channel_output(&tau).unwrap();
            assert!(out.trace_distance(&tau).unwrap() < 1e-12);
        }
    }

    #[test]
    fn channel_never_raises_free_energy() {
        let h = Hamiltonian::qubit();
        let mut rng = rng_from(11);
        for seed in 0..10u64 {
            let u = EnergyPreservingUnitary::random(h.clone(), h.clone(), seed).unwrap();
            let beta = InverseTemperature::Finite(0.3 + 0.4 * seed as f64);
            let ext = IsometricExtension::new(u, beta).unwrap();
            for _ in 0..5 {
                let rho = random_density(2, 2, &mut rng);
                let before = free_energy_raw(&rho, &h, beta).unwrap();
                let after = free_energy_raw(&ext.channel_output(&rho).unwrap(), &h, beta).unwrap();
                assert!(
                    after <= before + 1e-9,
                    "free energy rose: {before} -> {after}"
                );
            }
        }
    }

    #[test]
    fn pure_input_gives_pure_output() {
        let ext =
            IsometricExtension::qubit_family(c(0.6, 0.3), 0.4, InverseTemperature::Finite(1.3))
                .unwrap();
        let psi = crate::random::random_pure_state(2, &mut rng_from(8));
        let sigma = ext.apply(&psi.to_density()).unwrap();
        assert!(sigma.is_pure(1e-10));
        assert_abs_diff_eq!(sigma.vn_entropy(), 0.0, epsilon = 1e-9);
    }

    #[test]
    fn infinite_beta_extension_is_supported_for_nondegenerate_bath() {
        let ext = IsometricExtension::qubit_family(c(0.5, 0.0), 0.0, InverseTemperature::Infinite)
            .unwrap();
        let rho = random_density(2, 2, &mut rng_from(4));
        let out = ext.channel_output(&rho).unwrap();
        // At absolute zero the channel is still trace preserving and valid.
        assert_abs_diff_eq!(out.matrix().trace().re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn channel_output_energy_matches_unitary_bookkeeping() {
        // Energy of (s,b) is conserved: E_out(s) + E_out(b) = E_in(s) + E(τ).
        let h = Hamiltonian::qubit();
        let beta = InverseTemperature::Finite(1.0);
        let ext = IsometricExtension::qubit_family(c(0.3, 0.4), 0.9, beta).unwrap();
        let rho = random_density(2, 2, &mut rng_from(21));
        let sigma = ext.apply(&rho).unwrap();
        let e_s = energy(&sigma.partial_trace(&[0]).unwrap(), &h).unwrap();
        let e_b = energy(&sigma.partial_trace(&[1]).unwrap(), &h).unwrap();
        let tau = thermal_state(&h, beta);
        let expect = energy(&rho, &h).unwrap() + energy(&tau, &h).unwrap();
        assert_abs_diff_eq!(e_s + e_b, expect, epsilon = 1e-10);
    }
}
