//! Python bindings for the charge-retrieval engine.
//!
//! The module mirrors the core surface: build an `Extension` (the coupling
//! to a thermal bath at inverse temperature β) and a `Battery` state, then
//! optimize the retrieved charge under bath-only (`optimize_weak`) or
//! bath-and-reference (`optimize_strong`) measurements. Complex numbers map
//! to Python `complex`; β accepts `float('inf')` for the zero-temperature
//! limit. Invalid physics raises `ValueError`; out-of-scope requests raise
//! `NotImplementedError`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use pyo3::exceptions::{PyNotImplementedError, PyValueError};
use pyo3::prelude::*;
use qbat_core::channel::{EnergyPreservingUnitary, IsometricExtension};
use qbat_core::random::{random_fixed_purity, random_pure_state, rng_from};
use qbat_core::retrieval::{self, OptimizerConfig, RetrievalResult};
use qbat_core::state::{DensityOperator, StateVector};
use qbat_core::thermal::{self, Hamiltonian, InverseTemperature};
use qbat_core::{entangle, Error};

fn to_py_err(e: Error) -> PyErr {
    match e {
        Error::Unsupported(msg) => PyNotImplementedError::new_err(msg),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn beta_from(value: f64) -> PyResult<InverseTemperature> {
    if value.is_infinite() && value.is_sign_positive() {
        Ok(InverseTemperature::Infinite)
    } else {
        InverseTemperature::finite(value).map_err(to_py_err)
    }
}

fn square_matrix(rows: Vec<Vec<Complex64>>) -> PyResult<DMatrix<Complex64>> {
    let d = rows.len();
    if d == 0 || rows.iter().any(|r| r.len() != d) {
        return Err(PyValueError::new_err(format!(
            "expected a square matrix, got {d} rows of lengths {:?}",
            rows.iter().map(Vec::len).collect::<Vec<_>>()
        )));
    }
    Ok(DMatrix::from_fn(d, d, |i, j| rows[i][j]))
}

fn matrix_rows(m: &DMatrix<Complex64>) -> Vec<Vec<Complex64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

/// Two-qubit state from a 4×4 matrix in the product basis.
fn two_qubit_state(rows: Vec<Vec<Complex64>>) -> PyResult<DensityOperator> {
    let m = square_matrix(rows)?;
    if m.nrows() != 4 {
        return Err(PyValueError::new_err(format!(
            "expected a 4×4 two-qubit matrix, got {}×{}",
            m.nrows(),
            m.ncols()
        )));
    }
    DensityOperator::new(vec![2, 2], m).map_err(to_py_err)
}

/// Isometric extension of a thermal operation: an energy-preserving
/// system–bath unitary dilated with a purified bath at inverse
/// temperature β.
#[pyclass(frozen)]
struct Extension {
    inner: IsometricExtension,
}

#[pymethods]
impl Extension {
    /// Qubit coupling family: the single-excitation block is rotated by
    /// `alpha` with complementary amplitude direction `exp(i·gamma_phase)`.
    #[staticmethod]
    #[pyo3(signature = (alpha, gamma_phase, beta))]
    fn qubit_family(alpha: Complex64, gamma_phase: f64, beta: f64) -> PyResult<Self> {
        let inner = IsometricExtension::qubit_family(alpha, gamma_phase, beta_from(beta)?)
            .map_err(to_py_err)?;
        Ok(Self { inner })
    }

    /// Seeded Haar-random unitary on the degenerate total-energy sectors of
    /// the given system and bath level lists.
    #[staticmethod]
    #[pyo3(signature = (hamiltonian_s, hamiltonian_b, seed, beta))]
    fn random_block(
        hamiltonian_s: Vec<f64>,
        hamiltonian_b: Vec<f64>,
        seed: u64,
        beta: f64,
    ) -> PyResult<Self> {
        let hs = Hamiltonian::new(hamiltonian_s).map_err(to_py_err)?;
        let hb = Hamiltonian::new(hamiltonian_b).map_err(to_py_err)?;
        let u = EnergyPreservingUnitary::random(hs, hb, seed).map_err(to_py_err)?;
        let inner = IsometricExtension::new(u, beta_from(beta)?).map_err(to_py_err)?;
        Ok(Self { inner })
    }

    /// Inverse temperature (`inf` in the zero-temperature limit).
    #[getter]
    fn beta(&self) -> f64 {
        self.inner.beta().value().unwrap_or(f64::INFINITY)
    }

    /// Subsystem dimensions of the isometry output (system, bath, reference).
    #[getter]
    fn output_dims(&self) -> Vec<usize> {
        self.inner.output_dims()
    }

    fn __repr__(&self) -> String {
        format!(
            "Extension(beta={}, output_dims={:?})",
            self.beta(),
            self.output_dims()
        )
    }
}

/// Initial battery state.
#[pyclass(frozen)]
struct Battery {
    inner: DensityOperator,
}

#[pymethods]
impl Battery {
    /// Pure state from normalized amplitudes.
    #[staticmethod]
    fn pure(amplitudes: Vec<Complex64>) -> PyResult<Self> {
        let d = amplitudes.len();
        let psi = StateVector::new(vec![d], amplitudes).map_err(to_py_err)?;
        Ok(Self {
            inner: psi.to_density(),
        })
    }

    /// Mixed state from a density matrix (Hermitian, PSD, unit trace).
    #[staticmethod]
    fn mixed(matrix: Vec<Vec<Complex64>>) -> PyResult<Self> {
        let m = square_matrix(matrix)?;
        let d = m.nrows();
        let inner = DensityOperator::new(vec![d], m).map_err(to_py_err)?;
        Ok(Self { inner })
    }

    /// Seeded random state of prescribed purity in [1/dim, 1].
    #[staticmethod]
    #[pyo3(signature = (dim, purity, seed))]
    fn random(dim: usize, purity: f64, seed: u64) -> PyResult<Self> {
        let inner = random_fixed_purity(dim, purity, &mut rng_from(seed)).map_err(to_py_err)?;
        Ok(Self { inner })
    }

    /// Seeded Haar-random pure state.
    #[staticmethod]
    #[pyo3(signature = (dim, seed))]
    fn random_pure(dim: usize, seed: u64) -> PyResult<Self> {
        if dim == 0 {
            return Err(PyValueError::new_err("dimension must be positive"));
        }
        Ok(Self {
            inner: random_pure_state(dim, &mut rng_from(seed)).to_density(),
        })
    }

    /// Hilbert-space dimension.
    #[getter]
    fn dim(&self) -> usize {
        self.inner.total_dim()
    }

    /// Tr ρ².
    #[getter]
    fn purity(&self) -> f64 {
        self.inner.purity()
    }

    /// Density matrix as nested lists of complex entries.
    fn matrix(&self) -> Vec<Vec<Complex64>> {
        matrix_rows(self.inner.matrix())
    }

    fn __repr__(&self) -> String {
        format!("Battery(dim={}, purity={:.6})", self.dim(), self.purity())
    }
}

/// Outcome of a measurement-assisted retrieval optimization.
#[pyclass(frozen)]
struct Outcome {
    /// Best retrieved charge, raw scale.
    #[pyo3(get)]
    value_raw: f64,
    /// Raw value minus the thermal free energy.
    #[pyo3(get)]
    value_rescaled: f64,
    /// max(rescaled, 0).
    #[pyo3(get)]
    value_clamped: f64,
    /// Whether the restart loop converged within its budget.
    #[pyo3(get)]
    converged: bool,
    /// Restarts executed.
    #[pyo3(get)]
    restarts_used: usize,
}

#[pymethods]
impl Outcome {
    fn __repr__(&self) -> String {
        format!(
            "Outcome(value_raw={}, value_rescaled={}, value_clamped={}, \
             converged={}, restarts_used={})",
            self.value_raw,
            self.value_rescaled,
            self.value_clamped,
            self.converged,
            self.restarts_used
        )
    }
}

impl From<RetrievalResult> for Outcome {
    fn from(r: RetrievalResult) -> Self {
        Self {
            value_raw: r.value_raw,
            value_rescaled: r.value_rescaled,
            value_clamped: r.value_clamped,
            converged: r.converged,
            restarts_used: r.restarts_used,
        }
    }
}

fn optimizer(restarts: usize, max_iters: usize, seed: u64) -> OptimizerConfig {
    OptimizerConfig {
        restarts,
        max_iters,
        seed,
        ..OptimizerConfig::default()
    }
}

/// Maximizes the retrieved charge over rank-one POVMs on the bath alone.
#[pyfunction]
#[pyo3(signature = (ext, battery, restarts = 32, max_iters = 2000, seed = 0))]
fn optimize_weak(
    ext: &Extension,
    battery: &Battery,
    restarts: usize,
    max_iters: usize,
    seed: u64,
) -> PyResult<Outcome> {
    retrieval::optimize_weak(
        &ext.inner,
        &battery.inner,
        &optimizer(restarts, max_iters, seed),
    )
    .map(Outcome::from)
    .map_err(to_py_err)
}

/// Maximizes the retrieved charge over product rank-one POVMs on bath and
/// reference.
#[pyfunction]
#[pyo3(signature = (ext, battery, restarts = 32, max_iters = 2000, seed = 0))]
fn optimize_strong(
    ext: &Extension,
    battery: &Battery,
    restarts: usize,
    max_iters: usize,
    seed: u64,
) -> PyResult<Outcome> {
    retrieval::optimize_strong(
        &ext.inner,
        &battery.inner,
        &optimizer(restarts, max_iters, seed),
    )
    .map(Outcome::from)
    .map_err(to_py_err)
}

/// Strong minus weak optimum, from one cross-seeded joint run.
#[pyfunction]
#[pyo3(signature = (ext, battery, restarts = 32, max_iters = 2000, seed = 0))]
fn assistance_gap(
    ext: &Extension,
    battery: &Battery,
    restarts: usize,
    max_iters: usize,
    seed: u64,
) -> PyResult<f64> {
    retrieval::assistance_gap(
        &ext.inner,
        &battery.inner,
        &optimizer(restarts, max_iters, seed),
    )
    .map_err(to_py_err)
}

/// Analytic value of the weak optimum (a lower bound for mixed batteries).
#[pyfunction]
fn weak_closed_form(ext: &Extension, battery: &Battery) -> PyResult<f64> {
    retrieval::weak_closed_form(&ext.inner, &battery.inner).map_err(to_py_err)
}

/// Populations of the thermal state, one per energy level, in input order.
#[pyfunction]
fn thermal_populations(energies: Vec<f64>, beta: f64) -> PyResult<Vec<f64>> {
    let h = Hamiltonian::new(energies).map_err(to_py_err)?;
    let tau = thermal::thermal_state(&h, beta_from(beta)?);
    let m = tau.matrix();
    Ok((0..m.nrows()).map(|i| m[(i, i)].re).collect())
}

/// Raw free energy Tr(Hρ) − S(ρ)/β of a state given as a density matrix.
#[pyfunction]
fn free_energy(matrix: Vec<Vec<Complex64>>, energies: Vec<f64>, beta: f64) -> PyResult<f64> {
    let m = square_matrix(matrix)?;
    let d = m.nrows();
    let rho = DensityOperator::new(vec![d], m).map_err(to_py_err)?;
    let h = Hamiltonian::new(energies).map_err(to_py_err)?;
    thermal::free_energy_raw(&rho, &h, beta_from(beta)?).map_err(to_py_err)
}

/// Entanglement of formation of a two-qubit state (4×4 matrix), in nats.
#[pyfunction]
fn eof_wootters(matrix: Vec<Vec<Complex64>>) -> PyResult<f64> {
    entangle::eof_wootters(&two_qubit_state(matrix)?)
        .map(|r| r.value)
        .map_err(to_py_err)
}

/// Concurrence of a two-qubit state (4×4 matrix).
#[pyfunction]
fn concurrence(matrix: Vec<Vec<Complex64>>) -> PyResult<f64> {
    entangle::concurrence(&two_qubit_state(matrix)?).map_err(to_py_err)
}

#[pymodule]
fn qbat_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Extension>()?;
    m.add_class::<Battery>()?;
    m.add_class::<Outcome>()?;
    m.add_function(wrap_pyfunction!(optimize_weak, m)?)?;
    m.add_function(wrap_pyfunction!(optimize_strong, m)?)?;
    m.add_function(wrap_pyfunction!(assistance_gap, m)?)?;
    m.add_function(wrap_pyfunction!(weak_closed_form, m)?)?;
    m.add_function(wrap_pyfunction!(thermal_populations, m)?)?;
    m.add_function(wrap_pyfunction!(free_energy, m)?)?;
    m.add_function(wrap_pyfunction!(eof_wootters, m)?)?;
    m.add_function(wrap_pyfunction!(concurrence, m)?)?;
    Ok(())
}
