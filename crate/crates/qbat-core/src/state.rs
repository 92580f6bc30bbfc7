//! State vectors and density operators on tensor-product Hilbert spaces.
//!
//! Both types carry an explicit subsystem dimension list `dims`; a flat index
//! is the mixed-radix composition of per-subsystem indices with `dims[0]`
//! (the battery) most significant. Construction validates the quantum-state
//! invariants (normalization, Hermiticity, positivity, unit trace) against the
//! tolerances in [`crate::tol`] and then renormalizes exactly, so downstream
//! code can rely on clean inputs.

use crate::error::{Error, Result};
use crate::linalg;
use crate::tol;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

fn check_dims(dims: &[usize]) -> Result<()> {
    if dims.is_empty() {
        return Err(Error::InvalidValue(
            "subsystem dimension list is empty".into(),
        ));
    }
    if dims.iter().any(|&d| d == 0) {
        return Err(Error::InvalidValue(
            "subsystem dimensions must be ≥ 1".into(),
        ));
    }
    Ok(())
}

fn total_dim(dims: &[usize]) -> usize {
    dims.iter().product()
}

/// Validates a `keep` list against `dims`: in range, strictly increasing.
fn check_keep(dims: &[usize], keep: &[usize]) -> Result<()> {
    if keep.is_empty() {
        return Err(Error::InvalidValue("keep list is empty".into()));
    }
    if keep.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidValue(
            "keep list must be strictly increasing".into(),
        ));
    }
    if *keep.last().unwrap() >= dims.len() {
        return Err(Error::DimensionMismatch(format!(
            "keep index {} out of range for {} subsystems",
            keep.last().unwrap(),
            dims.len()
        )));
    }
    Ok(())
}

/// Flat offsets of every multi-index over `sub_dims` placed at positions
/// `subs` of a system with strides `strides`.
fn offsets(sub_dims: &[usize], subs: &[usize], strides: &[usize]) -> Vec<usize> {
    let count: usize = sub_dims.iter().product();
    let mut out = Vec::with_capacity(count);
    let mut digits = vec![0usize; sub_dims.len()];
    for _ in 0..count {
        out.push(
            digits
                .iter()
                .zip(subs)
                .map(|(&dg, &s)| dg * strides[s])
                .sum(),
        );
        for pos in (0..digits.len()).rev() {
            digits[pos] += 1;
            if digits[pos] < sub_dims[pos] {
                break;
            }
            digits[pos] = 0;
        }
    }
    out
}

fn strides_of(dims: &[usize]) -> Vec<usize> {
    let mut strides = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    strides
}

/// Normalized pure state on a tensor product of subsystems.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    dims: Vec<usize>,
    amps: DVector<Complex64>,
}

impl StateVector {
    /// Builds a state from amplitudes; rejects vectors whose norm deviates
    /// from 1 by more than [`tol::STATE_NORM`], then renormalizes exactly.
    pub fn new(dims: Vec<usize>, amps: Vec<Complex64>) -> Result<Self> {
        Self::from_dvector(dims, DVector::from_vec(amps))
    }

    /// As [`StateVector::new`] from an `nalgebra` vector.
    pub fn from_dvector(dims: Vec<usize>, amps: DVector<Complex64>) -> Result<Self> {
        check_dims(&dims)?;
        if total_dim(&dims) != amps.len() {
            return Err(Error::DimensionMismatch(format!(
                "dims product {} != amplitude count {}",
                total_dim(&dims),
                amps.len()
            )));
        }
        let norm = amps.norm();
        if (norm - 1.0).abs() > tol::STATE_NORM {
            return Err(Error::InvalidState(format!(
                "vector norm {norm} deviates from 1 beyond tolerance {}",
                tol::STATE_NORM
            )));
        }
        Ok(Self {
            dims,
            amps: amps.unscale(norm),
        })
    }

    /// Computational basis state |index⟩.
    pub fn basis(dims: Vec<usize>, index: usize) -> Result<Self> {
        check_dims(&dims)?;
        let d = total_dim(&dims);
        if index >= d {
            return Err(Error::InvalidValue(format!(
                "basis index {index} out of range for dimension {d}"
            )));
        }
        let mut amps = DVector::zeros(d);
        amps[index] = Complex64::ONE;
        Ok(Self { dims, amps })
    }

    /// Subsystem dimensions.
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Product of all subsystem dimensions.
    pub fn total_dim(&self) -> usize {
        self.amps.len()
    }

    /// Amplitudes in the computational basis.
    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amps
    }

    /// Tensor product; subsystem lists concatenate.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self {
            dims,
            amps: self.amps.kronecker(&other.amps),
        }
    }

    /// Inner product ⟨self|other⟩.
    pub fn overlap(&self, other: &Self) -> Result<Complex64> {
        if self.total_dim() != other.total_dim() {
            return Err(Error::DimensionMismatch(format!(
                "overlap of dimensions {} and {}",
                self.total_dim(),
                other.total_dim()
            )));
        }
        Ok(self.amps.dotc(&other.amps))
    }

    /// Projector |ψ⟩⟨ψ| as a density operator.
    pub fn to_density(&self) -> DensityOperator {
        DensityOperator {
            dims: self.dims.clone(),
            mat: &self.amps * self.amps.adjoint(),
        }
    }

    /// Reduced density operator on the kept subsystems (strictly increasing
    /// index list), computed directly from the amplitudes.
    pub fn reduced(&self, keep: &[usize]) -> Result<DensityOperator> {
        check_keep(&self.dims, keep)?;
        let strides = strides_of(&self.dims);
        let traced: Vec<usize> = (0..self.dims.len()).filter(|i| !keep.contains(i)).collect();
        let keep_dims: Vec<usize> = keep.iter().map(|&i| self.dims[i]).collect();
        let traced_dims: Vec<usize> = traced.iter().map(|&i| self.dims[i]).collect();
        let keep_off = offsets(&keep_dims, keep, &strides);
        let tr_off = offsets(&traced_dims, &traced, &strides);
        let dk = keep_off.len();
        let mut mat = DMatrix::<Complex64>::zeros(dk, dk);
        for (a, &oa) in keep_off.iter().enumerate() {
            for (b, &ob) in keep_off.iter().enumerate() {
                let mut acc = Complex64::ZERO;
                for &ot in &tr_off {
                    acc += self.amps[oa + ot] * self.amps[ob + ot].conj();
                }
                mat[(a, b)] = acc;
            }
        }
        Ok(DensityOperator {
            dims: keep_dims,
            mat,
        })
    }

    /// Reorders subsystems; `perm[k]` is the original position that moves to
    /// slot k of the result.
    pub fn permute_subsystems(&self, perm: &[usize]) -> Result<Self> {
        let map = permutation_map(&self.dims, perm)?;
        let dims: Vec<usize> = perm.iter().map(|&p| self.dims[p]).collect();
        let mut amps = DVector::zeros(self.amps.len());
        for (new, &old) in map.iter().enumerate() {
            amps[new] = self.amps[old];
        }
        Ok(Self { dims, amps })
    }
}

/// For each flat index of the permuted layout, the flat index in the original
/// layout holding the same tensor entry.
fn permutation_map(dims: &[usize], perm: &[usize]) -> Result<Vec<usize>> {
    let n = dims.len();
    let mut seen = vec![false; n];
    if perm.len() != n {
        return Err(Error::InvalidValue(format!(
            "permutation length {} does not match {} subsystems",
            perm.len(),
            n
        )));
    }
    for &p in perm {
        if p >= n || seen[p] {
            return Err(Error::InvalidValue("invalid subsystem permutation".into()));
        }
        seen[p] = true;
    }
    let strides = strides_of(dims);
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let total = total_dim(dims);
    let mut map = Vec::with_capacity(total);
    let mut digits = vec![0usize; n];
    for _ in 0..total {
        map.push(
            digits
                .iter()
                .zip(perm)
                .map(|(&dg, &p)| dg * strides[p])
                .sum(),
        );
        for pos in (0..n).rev() {
            digits[pos] += 1;
            if digits[pos] < new_dims[pos] {
                break;
            }
            digits[pos] = 0;
        }
    }
    Ok(map)
}

/// Density operator (Hermitian, positive semidefinite, unit trace) on a
/// tensor product of subsystems.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    dims: Vec<usize>,
    mat: DMatrix<Complex64>,
}

impl DensityOperator {
    /// Builds a density operator, validating Hermiticity, positivity and unit
    /// trace against [`crate::tol`]; the stored matrix is symmetrized and
    /// trace-renormalized exactly.
    pub fn new(dims: Vec<usize>, mat: DMatrix<Complex64>) -> Result<Self> {
        check_dims(&dims)?;
        let d = total_dim(&dims);
        if mat.nrows() != d || mat.ncols() != d {
            return Err(Error::DimensionMismatch(format!(
                "matrix is {}×{} but dims product is {d}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        let herm_dev = linalg::max_abs(&(&mat - mat.adjoint()));
        if herm_dev > tol::HERMITIAN {
            return Err(Error::InvalidState(format!(
                "matrix deviates from Hermitian by {herm_dev:.3e}"
            )));
        }
        let sym = (&mat + mat.adjoint()).scale(0.5);
        let trace = sym.trace().re;
        if (trace - 1.0).abs() > tol::TRACE {
            return Err(Error::InvalidState(format!(
                "trace {trace} deviates from 1 beyond tolerance {}",
                tol::TRACE
            )));
        }
        let min_eig = linalg::hermitian_eigenvalues(&sym)
            .first()
            .copied()
            .unwrap_or(0.0);
        if min_eig < -tol::PSD {
            return Err(Error::InvalidState(format!(
                "matrix has negative eigenvalue {min_eig:.3e}"
            )));
        }
        Ok(Self {
            dims,
            mat: sym.unscale(trace),
        })
    }

    /// Repair constructor for matrices that are a valid state up to round-off
    /// slightly beyond the strict tolerances (e.g. conditioned states at small
    /// probability): symmetrizes, clamps negative eigenvalues to zero, and
    /// renormalizes the trace.
    pub(crate) fn repaired(dims: Vec<usize>, mat: DMatrix<Complex64>) -> Result<Self> {
        check_dims(&dims)?;
        let d = total_dim(&dims);
        if mat.nrows() != d || mat.ncols() != d {
            return Err(Error::DimensionMismatch(format!(
                "matrix is {}×{} but dims product is {d}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        let sym = (&mat + mat.adjoint()).scale(0.5);
        let (vals, vecs) = linalg::hermitian_eigen(&sym);
        let clamped: Vec<f64> = vals.iter().map(|&v| v.max(0.0)).collect();
        let total: f64 = clamped.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidState(
                "matrix has no positive spectral weight".into(),
            ));
        }
        let diag = DMatrix::from_diagonal(&DVector::from_iterator(
            d,
            clamped.iter().map(|&v| Complex64::new(v / total, 0.0)),
        ));
        let mat = &vecs * diag * vecs.adjoint();
        Ok(Self { dims, mat })
    }

    /// |ψ⟩⟨ψ| for a pure state.
    pub fn from_pure(psi: &StateVector) -> Self {
        psi.to_density()
    }

    /// Maximally mixed state I/d.
    pub fn maximally_mixed(dims: Vec<usize>) -> Result<Self> {
        check_dims(&dims)?;
        let d = total_dim(&dims);
        let mat = DMatrix::identity(d, d).unscale(d as f64);
        Ok(Self { dims, mat })
    }

    /// Subsystem dimensions.
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Product of all subsystem dimensions.
    pub fn total_dim(&self) -> usize {
        self.mat.nrows()
    }

    /// Matrix in the computational basis.
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    /// Tensor product; subsystem lists concatenate.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self {
            dims,
            mat: self.mat.kronecker(&other.mat),
        }
    }

    /// Partial trace keeping the listed subsystems (strictly increasing).
    ///
    /// Kept subsystems retain their original relative order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        check_keep(&self.dims, keep)?;
        let strides = strides_of(&self.dims);
        let traced: Vec<usize> = (0..self.dims.len()).filter(|i| !keep.contains(i)).collect();
        let keep_dims: Vec<usize> = keep.iter().map(|&i| self.dims[i]).collect();
        let traced_dims: Vec<usize> = traced.iter().map(|&i| self.dims[i]).collect();
        let keep_off = offsets(&keep_dims, keep, &strides);
        let tr_off = offsets(&traced_dims, &traced, &strides);
        let dk = keep_off.len();
        let mut mat = DMatrix::<Complex64>::zeros(dk, dk);
        for (a, &oa) in keep_off.iter().enumerate() {
            for (b, &ob) in keep_off.iter().enumerate() {
                let mut acc = Complex64::ZERO;
                for &ot in &tr_off {
                    acc += self.mat[(oa + ot, ob + ot)];
                }
                mat[(a, b)] = acc;
            }
        }
        Ok(Self {
            dims: keep_dims,
            mat,
        })
    }

    /// Reorders subsystems; `perm[k]` is the original position that moves to
    /// slot k of the result.
    pub fn permute_subsystems(&self, perm: &[usize]) -> Result<Self> {
        let map = permutation_map(&self.dims, perm)?;
        let dims: Vec<usize> = perm.iter().map(|&p| self.dims[p]).collect();
        let d = self.mat.nrows();
        let mut mat = DMatrix::zeros(d, d);
        for (a, &oa) in map.iter().enumerate() {
            for (b, &ob) in map.iter().enumerate() {
                mat[(a, b)] = self.mat[(oa, ob)];
            }
        }
        Ok(Self { dims, mat })
    }

    /// Eigenvalues, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(&self.mat)
    }

    /// Von Neumann entropy −Tr ρ ln ρ in nats.
    ///
    /// Eigenvalues below [`tol::SPECTRUM_CUT`] are dropped.
    pub fn vn_entropy(&self) -> f64 {
        linalg::spectrum_entropy(&self.eigenvalues())
    }

    /// Purity Tr ρ².
    pub fn purity(&self) -> f64 {
        self.mat.iter().map(|z| z.norm_sqr()).sum()
    }

    /// True when purity is within `tol` of 1.
    pub fn is_pure(&self, tol: f64) -> bool {
        self.purity() >= 1.0 - tol
    }

    /// Trace distance ½‖ρ − σ‖₁; requires equal total dimension.
    pub fn trace_distance(&self, other: &Self) -> Result<f64> {
        if self.total_dim() != other.total_dim() {
            return Err(Error::DimensionMismatch(format!(
                "trace distance between dimensions {} and {}",
                self.total_dim(),
                other.total_dim()
            )));
        }
        let diff = &self.mat - &other.mat;
        let vals = linalg::hermitian_eigenvalues(&diff);
        Ok(0.5 * vals.iter().map(|v| v.abs()).sum::<f64>())
    }

    /// Canonical purification on dims `[d, d]` with d the total dimension:
    /// |ψ⟩ = Σ_k √λ_k |e_k⟩|k⟩. Tracing out the second factor recovers ρ
    /// exactly.
    pub fn purify(&self) -> StateVector {
        let d = self.total_dim();
        let (vals, vecs) = linalg::hermitian_eigen(&self.mat);
        let mut amps = DVector::zeros(d * d);
        for (k, &v) in vals.iter().enumerate() {
            let w = v.max(0.0).sqrt();
            if w == 0.0 {
                continue;
            }
            for i in 0..d {
                amps[i * d + k] = w * vecs[(i, k)];
            }
        }
        let norm = amps.norm();
        StateVector {
            dims: vec![d, d],
            amps: amps.unscale(norm),
        }
    }

    /// Purification with the original subsystem list plus a rank-sized
    /// ancilla appended (eigenvalues below [`tol::SPECTRUM_CUT`] dropped).
    pub(crate) fn purify_compact(&self) -> StateVector {
        let d = self.total_dim();
        let (vals, vecs) = linalg::hermitian_eigen(&self.mat);
        let kept: Vec<usize> = (0..d).filter(|&k| vals[k] > tol::SPECTRUM_CUT).collect();
        let r = kept.len().max(1);
        let mut amps = DVector::zeros(d * r);
        for (slot, &k) in kept.iter().enumerate() {
            let w = vals[k].sqrt();
            for i in 0..d {
                amps[i * r + slot] = w * vecs[(i, k)];
            }
        }
        let mut dims = self.dims.clone();
        dims.push(r);
        let norm = amps.norm();
        StateVector {
            dims,
            amps: amps.unscale(norm),
        }
    }

    /// Rank of the state counting eigenvalues above [`tol::SPECTRUM_CUT`].
    pub fn rank(&self) -> usize {
        self.eigenvalues()
            .iter()
            .filter(|&&v| v > tol::SPECTRUM_CUT)
            .count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn plus() -> StateVector {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        StateVector::new(vec![2], vec![c(h, 0.0), c(h, 0.0)]).unwrap()
    }

    #[test]
    fn rejects_non_normalized_vector() {
        let err = StateVector::new(vec![2], vec![c(1.0, 0.0), c(1e-3, 0.0)]).unwrap_err();
        assert!(matches!(err, Error::InvalidState(_)), "{err}");
    }

    #[test]
    fn rejects_dims_amplitude_mismatch() {
        let err = StateVector::new(vec![2, 2], vec![c(1.0, 0.0); 3]).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch(_)), "{err}");
    }

    #[test]
    fn tensor_amplitudes_compose_mixed_radix() {
        // (s=0,b=1,R=1) of |0⟩_s ⊗ (|00⟩+w|11⟩)_{bR} sits at flat index 3.
        let w = 0.6;
        let pair = StateVector::new(
            vec![2, 2],
            vec![c(0.8, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(w, 0.0)],
        )
        .unwrap();
        let s = StateVector::basis(vec![2], 0).unwrap();
        let full = s.tensor(&pair);
        assert_eq!(full.dims(), &[2, 2, 2]);
        assert_abs_diff_eq!(full.amplitudes()[3].re, w, epsilon = 1e-15);
        assert_abs_diff_eq!(full.amplitudes()[0].re, 0.8, epsilon = 1e-15);
    }

    #[test]
    fn reduced_of_bell_pair_is_maximally_mixed() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = StateVector::new(
            vec![2, 2],
            vec![c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(h, 0.0)],
        )
        .unwrap();
        for keep in [&[0usize][..], &[1][..]] {
            let red = bell.reduced(keep).unwrap();
            let mm = DensityOperator::maximally_mixed(vec![2]).unwrap();
            assert!(red.trace_distance(&mm).unwrap() < 1e-12);
        }
    }

    #[test]
    fn partial_trace_of_product_recovers_factor() {
        let a = plus().to_density();
        let b = DensityOperator::new(
            vec![2],
            DMatrix::from_row_slice(2, 2, &[c(0.7, 0.0), c(0.1, 0.2), c(0.1, -0.2), c(0.3, 0.0)]),
        )
        .unwrap();
        let ab = a.tensor(&b);
        assert_eq!(ab.dims(), &[2, 2]);
        assert!(ab.partial_trace(&[0]).unwrap().trace_distance(&a).unwrap() < 1e-12);
        assert!(ab.partial_trace(&[1]).unwrap().trace_distance(&b).unwrap() < 1e-12);
    }

    #[test]
    fn partial_trace_validates_keep_list() {
        let rho = DensityOperator::maximally_mixed(vec![2, 2]).unwrap();
        assert!(matches!(
            rho.partial_trace(&[]),
            Err(Error::InvalidValue(_))
        ));
        assert!(matches!(
            rho.partial_trace(&[2]),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(matches!(
            rho.partial_trace(&[1, 0]),
            Err(Error::InvalidValue(_))
        ));
    }

    #[test]
    fn entropy_frozen_values() {
        // Thermal qubit populations at inverse temperature 1.
        let p = 0.7310585786300049;
        let q = 0.2689414213699951;
        let rho = DensityOperator::new(
            vec![2],
            DMatrix::from_diagonal(&DVector::from_vec(vec![c(p, 0.0), c(q, 0.0)])),
        )
        .unwrap();
        assert_abs_diff_eq!(rho.vn_entropy(), 0.5822031088882179, epsilon = 1e-12);
        let pure = plus().to_density();
        assert_abs_diff_eq!(pure.vn_entropy(), 0.0, epsilon = 1e-12);
        let mm = DensityOperator::maximally_mixed(vec![2, 2]).unwrap();
        assert_abs_diff_eq!(mm.vn_entropy(), (4.0f64).ln(), epsilon = 1e-12);
    }

    #[test]
    fn entropy_is_additive_over_tensor_products() {
        let a = DensityOperator::new(
            vec![2],
            DMatrix::from_diagonal(&DVector::from_vec(vec![c(0.9, 0.0), c(0.1, 0.0)])),
        )
        .unwrap();
        let b = DensityOperator::new(
            vec![3],
            DMatrix::from_diagonal(&DVector::from_vec(vec![
                c(0.5, 0.0),
                c(0.3, 0.0),
                c(0.2, 0.0),
            ])),
        )
        .unwrap();
        let ab = a.tensor(&b);
        assert_abs_diff_eq!(
            ab.vn_entropy(),
            a.vn_entropy() + b.vn_entropy(),
            epsilon = 1e-10
        );
    }

    #[test]
    fn trace_distance_frozen_value() {
        // ½‖I/2 − τ₁‖₁ where τ₁ has populations (0.731059, 0.268941).
        let p = 0.7310585786300049;
        let tau = DensityOperator::new(
            vec![2],
            DMatrix::from_diagonal(&DVector::from_vec(vec![c(p, 0.0), c(1.0 - p, 0.0)])),
        )
        .unwrap();
        let mm = DensityOperator::maximally_mixed(vec![2]).unwrap();
        assert_abs_diff_eq!(
            mm.trace_distance(&tau).unwrap(),
            0.2310585786300049,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(tau.trace_distance(&tau).unwrap(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn purify_traces_back_to_original() {
        let mat =
            DMatrix::from_row_slice(2, 2, &[c(0.6, 0.0), c(0.2, -0.1), c(0.2, 0.1), c(0.4, 0.0)]);
        let rho = DensityOperator::new(vec![2], mat).unwrap();
        let psi = rho.purify();
        assert_eq!(psi.dims(), &[2, 2]);
        let back = psi.reduced(&[0]).unwrap();
        assert!(back.trace_distance(&rho).unwrap() < 1e-12);

        let compact = rho.purify_compact();
        assert_eq!(compact.dims(), &[2, 2]);
        let back2 = compact.reduced(&[0]).unwrap();
        assert!(back2.trace_distance(&rho).unwrap() < 1e-10);
    }

    #[test]
    fn purify_compact_appends_rank_sized_ancilla() {
        let pure = plus().to_density();
        let psi = pure.purify_compact();
        assert_eq!(psi.dims(), &[2, 1]);
        let rank3 = DensityOperator::new(
            vec![2, 2],
            DMatrix::from_diagonal(&DVector::from_vec(vec![
                c(0.5, 0.0),
                c(0.3, 0.0),
                c(0.2, 0.0),
                c(0.0, 0.0),
            ])),
        )
        .unwrap();
        assert_eq!(rank3.rank(), 3);
        assert_eq!(rank3.purify_compact().dims(), &[2, 2, 3]);
    }

    #[test]
    fn rejects_non_hermitian_and_negative_matrices() {
        let non_herm =
            DMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.3, 0.0), c(0.0, 0.0), c(0.5, 0.0)]);
        assert!(matches!(
            DensityOperator::new(vec![2], non_herm),
            Err(Error::InvalidState(_))
        ));
        let neg = DMatrix::from_diagonal(&DVector::from_vec(vec![c(1.1, 0.0), c(-0.1, 0.0)]));
        assert!(matches!(
            DensityOperator::new(vec![2], neg),
            Err(Error::InvalidState(_))
        ));
        let bad_trace = DMatrix::from_diagonal(&DVector::from_vec(vec![c(0.6, 0.0), c(0.6, 0.0)]));
        assert!(matches!(
            DensityOperator::new(vec![2], bad_trace),
            Err(Error::InvalidState(_))
        ));
    }

    #[test]
    fn repaired_clamps_round_off_negatives() {
        let mat = DMatrix::from_diagonal(&DVector::from_vec(vec![
            c(1.0 + 5e-10, 0.0),
            c(-5e-10, 0.0),
        ]));
        let rho = DensityOperator::repaired(vec![2], mat).unwrap();
        let evs = rho.eigenvalues();
        assert!(evs[0] >= 0.0);
        assert_abs_diff_eq!(evs.iter().sum::<f64>(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn permute_subsystems_round_trips() {
        let a = plus();
        let b = StateVector::basis(vec![3], 1).unwrap();
        let ab = a.tensor(&b);
        let ba = ab.permute_subsystems(&[1, 0]).unwrap();
        assert_eq!(ba.dims(), &[3, 2]);
        let back = ba.permute_subsystems(&[1, 0]).unwrap();
        assert_eq!(back.amplitudes(), ab.amplitudes());

        let rho = a.to_density().tensor(&b.to_density());
        let swapped = rho.permute_subsystems(&[1, 0]).unwrap();
        let expect = b.to_density().tensor(&a.to_density());
        assert!(swapped.trace_distance(&expect).unwrap() < 1e-13);
    }

    #[test]
    fn purity_detects_pure_and_mixed() {
        assert!(plus().to_density().is_pure(1e-12));
        assert!(!DensityOperator::maximally_mixed(vec![2])
            .unwrap()
            .is_pure(1e-3));
    }
}
