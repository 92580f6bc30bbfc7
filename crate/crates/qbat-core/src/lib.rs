//! Simulation and verification of environment-assisted charge retrieval from
//! qubit batteries coupled to a thermal bath.
//!
//! A battery state ρ on system `s` interacts with a bath qubit prepared in the
//! Gibbs state τ_β through an energy-preserving unitary `U_sb`. Purifying the
//! bath with a reference `R` turns the thermal channel into an isometry
//! `V : H_s → H_s ⊗ H_b ⊗ H_R`. After the interaction, an agent may measure
//! the bath alone (bath-only assistance) or the bath and the reference
//! separately (bath-and-reference assistance) and feed the outcomes back; the
//! retrieved charge is the outcome-averaged free energy of the conditioned
//! system states, maximized over rank-one measurements.
//!
//! Crate layout:
//! - [`state`]: state vectors and density operators on tensor products.
//! - [`thermal`]: Hamiltonians, inverse temperature, Gibbs states, free energy.
//! - [`channel`]: energy-preserving unitaries and isometric channel extensions.
//! - [`measure`]: POVMs and outcome-conditioned ensembles.
//! - [`entangle`]: entanglement of formation (pure cut, Wootters, search).
//! - [`retrieval`]: retrieved-charge optimization over assisting measurements.
//! - [`verify`]: seeded numerical certification of the structural bounds.
//!
//! All entropies and free energies are in nats; energies are in the units of
//! the supplied Hamiltonian. Subsystem ordering is `(s, b, R)` with the
//! battery always at index 0.

pub mod channel;
pub mod entangle;
mod error;
mod linalg;
pub mod measure;
mod optim;
pub mod random;
pub mod retrieval;
pub mod state;
pub mod thermal;
pub mod verify;

pub use error::{Error, Result};
pub use linalg::stable_hash64;

/// Shared numerical tolerances.
///
/// Construction-time validation uses the tight 1e-10 family; derived-quantity
/// validation (POVM completeness, commutators) uses 1e-9 to absorb
/// accumulation error; probabilities below `NEGLIGIBLE_PROB` are flagged and
/// excluded from averages.
pub mod tol {
    /// Max allowed |‖ψ‖ − 1| when constructing a state vector.
    pub const STATE_NORM: f64 = 1e-10;
    /// Max allowed entry of |ρ − ρ†| when constructing a density operator.
    pub const HERMITIAN: f64 = 1e-10;
    /// Max allowed |Tr ρ − 1| when constructing a density operator.
    pub const TRACE: f64 = 1e-10;
    /// Most negative eigenvalue a density operator may have at construction.
    pub const PSD: f64 = 1e-10;
    /// Max allowed entry of |U†U − I| for unitaries and isometries.
    pub const UNITARY: f64 = 1e-10;
    /// Max allowed entry of |ΣE_k − I| for POVM completeness.
    pub const POVM_SUM: f64 = 1e-9;
    /// Max allowed entry of |[U, H_s⊗I + I⊗H_b]| for energy preservation.
    pub const COMMUTATOR: f64 = 1e-9;
    /// Energy gap below which total-energy levels are treated as degenerate.
    pub const ENERGY_BLOCK: f64 = 1e-9;
    /// Outcome probabilities below this are flagged and excluded from averages.
    pub const NEGLIGIBLE_PROB: f64 = 1e-12;
    /// Eigenvalues below this are dropped from entropies and rank counts.
    pub const SPECTRUM_CUT: f64 = 1e-12;
}
