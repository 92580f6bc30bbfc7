//! Hamiltonians, inverse temperature, Gibbs states, and free energy.
//!
//! Hamiltonians are diagonal in the computational basis: a sorted list of
//! energies E_0 ≤ E_1 ≤ … identifies level k with basis state |k⟩. The Gibbs
//! state at inverse temperature β is τ_β = e^{−βH}/Z; its purification
//! |φ_β⟩ = Z^{−1/2} Σ_k e^{−βE_k/2} |k⟩|k⟩ doubles the space with a reference
//! copy. Free energy is F_β(ρ) = Tr(Hρ) − S(ρ)/β in nats; the rescaled
//! variant subtracts F_β(τ_β) so the Gibbs state sits at zero. The absolute
//! zero limit β = ∞ is represented exactly: 1/β = 0, the Gibbs state is the
//! ground-level mixture, and free energy reduces to mean energy.

use crate::error::{Error, Result};
use crate::state::{DensityOperator, StateVector};
use crate::tol;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Diagonal Hamiltonian given by its energy levels.
///
/// Construction sorts the levels nondecreasingly and records the permutation
/// from sorted slot to original input position.
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    energies: Vec<f64>,
    input_positions: Vec<usize>,
}

impl Hamiltonian {
    /// Builds a Hamiltonian from energy levels (at least two, all finite).
    pub fn new(energies: Vec<f64>) -> Result<Self> {
        if energies.len() < 2 {
            return Err(Error::InvalidValue(
                "a Hamiltonian needs at least two levels".into(),
            ));
        }
        if energies.iter().any(|e| !e.is_finite()) {
            return Err(Error::InvalidValue("energies must be finite".into()));
        }
        let mut order: Vec<usize> = (0..energies.len()).collect();
        order.sort_by(|&a, &b| energies[a].total_cmp(&energies[b]));
        let sorted: Vec<f64> = order.iter().map(|&i| energies[i]).collect();
        Ok(Self {
            energies: sorted,
            input_positions: order,
        })
    }

    /// Two-level Hamiltonian diag(0, 1) used by the qubit channel family.
    pub fn qubit() -> Self {
        Self {
            energies: vec![0.0, 1.0],
            input_positions: vec![0, 1],
        }
    }

    /// Number of levels.
    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    /// Energies, sorted nondecreasingly.
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// For each sorted slot k, the position of that level in the input list.
    pub fn input_positions(&self) -> &[usize] {
        &self.input_positions
    }

    /// Ground-level energy.
    pub fn ground_energy(&self) -> f64 {
        self.energies[0]
    }

    /// Number of levels within [`tol::ENERGY_BLOCK`] of the ground energy.
    pub fn ground_degeneracy(&self) -> usize {
        self.energies
            .iter()
            .take_while(|&&e| e - self.energies[0] <= tol::ENERGY_BLOCK)
            .count()
    }

    /// Matrix form diag(E_0, …).
    pub fn matrix(&self) -> DMatrix<Complex64> {
        DMatrix::from_diagonal(&DVector::from_iterator(
            self.dim(),
            self.energies.iter().map(|&e| Complex64::new(e, 0.0)),
        ))
    }
}

/// Inverse temperature β: finite and positive, or the absolute-zero limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InverseTemperature {
    /// Finite β > 0.
    Finite(f64),
    /// β = ∞ (absolute zero); 1/β is exactly 0.
    Infinite,
}

impl InverseTemperature {
    /// Builds a finite inverse temperature; must be positive and finite.
    pub fn finite(beta: f64) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::InvalidValue(format!(
                "inverse temperature must be positive and finite, got {beta}"
            )));
        }
        Ok(Self::Finite(beta))
    }

    /// 1/β; exactly 0 in the absolute-zero limit.
    pub fn recip(&self) -> f64 {
        match self {
            Self::Finite(b) => 1.0 / b,
            Self::Infinite => 0.0,
        }
    }

    /// The finite value, if any.
    pub fn value(&self) -> Option<f64> {
        match self {
            Self::Finite(b) => Some(*b),
            Self::Infinite => None,
        }
    }

    /// True in the absolute-zero limit.
    pub fn is_infinite(&self) -> bool {
        matches!(self, Self::Infinite)
    }
}

impl std::fmt::Display for InverseTemperature {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Finite(b) => write!(f, "{b}"),
            Self::Infinite => write!(f, "inf"),
        }
    }
}

/// Gibbs weights e^{−β(E_k − E_0)} (unnormalized, overflow-safe).
fn shifted_weights(h: &Hamiltonian, beta: f64) -> Vec<f64> {
    let e0 = h.ground_energy();
    h.energies()
        .iter()
        .map(|&e| (-beta * (e - e0)).exp())
        .collect()
}

/// Gibbs state τ_β = e^{−βH}/Z.
///
/// At β = ∞ this is the uniform mixture over the (possibly degenerate)
/// ground level.
pub fn thermal_state(h: &Hamiltonian, beta: InverseTemperature) -> DensityOperator {
    let populations: Vec<f64> = match beta {
        InverseTemperature::Finite(b) => {
            let w = shifted_weights(h, b);
            let z: f64 = w.iter().sum();
            w.into_iter().map(|x| x / z).collect()
        }
        InverseTemperature::Infinite => {
            let g = h.ground_degeneracy();
            (0..h.dim())
                .map(|k| if k < g { 1.0 / g as f64 } else { 0.0 })
                .collect()
        }
    };
    let mat = DMatrix::from_diagonal(&DVector::from_iterator(
        h.dim(),
        populations.iter().map(|&p| Complex64::new(p, 0.0)),
    ));
    DensityOperator::new(vec![h.dim()], mat).expect("thermal populations form a valid state")
}

/// Purified Gibbs state |φ_β⟩ = Z^{−1/2} Σ_k e^{−βE_k/2}|k⟩|k⟩ on dims [d, d].
///
/// At β = ∞ the ground level must be nondegenerate (the limit is then the
/// product |0⟩|0⟩); a degenerate ground level has no canonical pure limit and
/// is rejected.
pub fn purified_thermal(h: &Hamiltonian, beta: InverseTemperature) -> Result<StateVector> {
    let d = h.dim();
    let mut amps = DVector::zeros(d * d);
    match beta {
        InverseTemperature::Finite(b) => {
            let w = shifted_weights(h, b);
            let z: f64 = w.iter().sum();
            for k in 0..d {
                amps[k * d + k] = Complex64::new((w[k] / z).sqrt(), 0.0);
            }
        }
        InverseTemperature::Infinite => {
            if h.ground_degeneracy() > 1 {
                return Err(Error::Unsupported(
                    "purified Gibbs state at infinite β needs a nondegenerate ground level".into(),
                ));
            }
            amps[0] = Complex64::ONE;
        }
    }
    StateVector::from_dvector(vec![d, d], amps)
}

/// Mean energy Tr(Hρ).
pub fn energy(rho: &DensityOperator, h: &Hamiltonian) -> Result<f64> {
    if rho.total_dim() != h.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state dimension {} vs Hamiltonian dimension {}",
            rho.total_dim(),
            h.dim()
        )));
    }
    Ok(h.energies()
        .iter()
        .enumerate()
        .map(|(k, &e)| e * rho.matrix()[(k, k)].re)
        .sum())
}

/// Free energy F_β(ρ) = Tr(Hρ) − S(ρ)/β in nats; mean energy at β = ∞.
pub fn free_energy_raw(
    rho: &DensityOperator,
    h: &Hamiltonian,
    beta: InverseTemperature,
) -> Result<f64> {
    Ok(energy(rho, h)? - beta.recip() * rho.vn_entropy())
}

/// Rescaled free energy F_β(ρ) − F_β(τ_β); zero on the Gibbs state.
pub fn free_energy_rescaled(
    rho: &DensityOperator,
    h: &Hamiltonian,
    beta: InverseTemperature,
) -> Result<f64> {
    Ok(free_energy_raw(rho, h, beta)? - thermal_free_energy_raw(h, beta))
}

/// ln Z at finite β, computed overflow-safe as −βE_0 + ln Σ e^{−β(E−E_0)}.
pub fn log_partition(h: &Hamiltonian, beta: f64) -> f64 {
    let z_shifted: f64 = shifted_weights(h, beta).iter().sum();
    -beta * h.ground_energy() + z_shifted.ln()
}

/// F_β(τ_β) = −(ln Z)/β at finite β; the ground energy at β = ∞.
pub fn thermal_free_energy_raw(h: &Hamiltonian, beta: InverseTemperature) -> f64 {
    match beta {
        InverseTemperature::Finite(b) => -log_partition(h, b) / b,
        InverseTemperature::Infinite => h.ground_energy(),
    }
}
