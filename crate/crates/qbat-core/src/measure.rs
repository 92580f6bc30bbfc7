//! POVMs and outcome-conditioned ensembles.
//!
//! A POVM here is a finite list of positive semidefinite elements summing to
//! the identity. Rank-one POVMs — the ones retrieval optimizes over — are
//! built from frame vectors: n kets u_k ∈ C^d with Σ_k |u_k⟩⟨u_k| = I. After
//! the channel isometry, conditioning the (s, b, R) output on a measurement of
//! the bath alone ([`condition_weak`]) or of bath and reference separately
//! ([`condition_strong`]) yields the ensemble of post-measurement battery
//! states whose average free energy the retrieval protocols maximize.

use crate::error::{Error, Result};
use crate::linalg;
use crate::state::DensityOperator;
use crate::tol;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Positive-operator-valued measure on a single subsystem.
#[derive(Debug, Clone)]
pub struct Povm {
    dim: usize,
    elements: Vec<DMatrix<Complex64>>,
}

impl Povm {
    /// Builds a POVM from explicit elements, validating Hermiticity,
    /// positivity (within [`tol::PSD`]) and completeness (within
    /// [`tol::POVM_SUM`]).
    pub fn from_elements(dim: usize, elements: Vec<DMatrix<Complex64>>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::InvalidMeasurement(
                "a POVM needs at least one element".into(),
            ));
        }
        let mut sum = DMatrix::<Complex64>::zeros(dim, dim);
        for (k, e) in elements.iter().enumerate() {
            if e.nrows() != dim || e.ncols() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "element {k} is {}×{}, expected {dim}×{dim}",
                    e.nrows(),
                    e.ncols()
                )));
            }
            let herm = linalg::max_abs(&(e - e.adjoint()));
            if herm > tol::HERMITIAN {
                return Err(Error::InvalidMeasurement(format!(
                    "element {k} deviates from Hermitian by {herm:.3e}"
                )));
            }
            let min_eig = linalg::min_hermitian_eigenvalue(e);
            if min_eig < -tol::PSD {
                return Err(Error::InvalidMeasurement(format!(
                    "element {k} has negative eigenvalue {min_eig:.3e}"
                )));
            }
            sum += e;
        }
        let dev = linalg::identity_deviation(&sum);
        if dev > tol::POVM_SUM {
            return Err(Error::InvalidMeasurement(format!(
                "elements sum deviates from identity by {dev:.3e}"
            )));
        }
        Ok(Self { dim, elements })
    }

    /// Rank-one POVM w_k |v_k⟩⟨v_k| from unit vectors and nonnegative weights.
    pub fn rank_one(vectors: Vec<DVector<Complex64>>, weights: Vec<f64>) -> Result<Self> {
        if vectors.len() != weights.len() {
            return Err(Error::InvalidMeasurement(format!(
                "{} vectors but {} weights",
                vectors.len(),
                weights.len()
            )));
        }
        if vectors.is_empty() {
            return Err(Error::InvalidMeasurement(
                "a POVM needs at least one element".into(),
            ));
        }
        let dim = vectors[0].len();
        let mut elements = Vec::with_capacity(vectors.len());
        for (k, (v, &w)) in vectors.iter().zip(&weights).enumerate() {
            if v.len() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "vector {k} has dimension {}, expected {dim}",
                    v.len()
                )));
            }
            if !(w >= 0.0) {
                return Err(Error::InvalidMeasurement(format!(
                    "weight {k} is negative ({w})"
                )));
            }
            let norm = v.norm();
            if w > tol::NEGLIGIBLE_PROB && (norm - 1.0).abs() > 1e-8 {
                return Err(Error::InvalidMeasurement(format!(
                    "vector {k} has norm {norm}, expected 1"
                )));
            }
            elements.push((v * v.adjoint()).scale(w));
        }
        Self::from_elements(dim, elements)
    }

    /// Rank-one POVM directly from unnormalized frame kets u_k
    /// (element k is |u_k⟩⟨u_k|).
    pub(crate) fn from_frame(dim: usize, frame: &[DVector<Complex64>]) -> Result<Self> {
        let elements: Vec<DMatrix<Complex64>> = frame.iter().map(|u| u * u.adjoint()).collect();
        Self::from_elements(dim, elements)
    }

    /// Projective measurement in the computational basis.
    pub fn computational(dim: usize) -> Self {
        let elements = (0..dim)
            .map(|k| {
                let mut e = DMatrix::zeros(dim, dim);
                e[(k, k)] = Complex64::ONE;
                e
            })
            .collect();
        Self { dim, elements }
    }

    /// Projective measurement in the basis given by the columns of a unitary.
    pub fn projective(basis: &DMatrix<Complex64>) -> Result<Self> {
        let dim = basis.nrows();
        if basis.ncols() != dim {
            return Err(Error::DimensionMismatch(
                "projective basis must be square".into(),
            ));
        }
        let elements = (0..dim)
            .map(|k| {
                let col = basis.column(k);
                col * col.adjoint()
            })
            .collect();
        Self::from_elements(dim, elements)
    }

    /// The trivial POVM {I}: measure nothing.
    pub fn trivial(dim: usize) -> Self {
        Self {
            dim,
            elements: vec![DMatrix::identity(dim, dim)],
        }
    }

    /// Subsystem dimension the POVM acts on.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of outcomes.
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    /// True when there are no outcomes (never holds for validated POVMs).
    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Measurement elements.
    pub fn elements(&self) -> &[DMatrix<Complex64>] {
        &self.elements
    }
}

/// One measurement outcome: its probability and the conditioned battery state.
#[derive(Debug, Clone)]
pub struct Outcome {
    /// Probability of the outcome.
    pub probability: f64,
    /// Post-measurement battery state. For negligible outcomes this is a
    /// maximally mixed placeholder and must not enter averages.
    pub state: DensityOperator,
    /// True when the probability is below [`tol::NEGLIGIBLE_PROB`]; such
    /// outcomes are excluded from ensemble averages.
    pub negligible: bool,
}

/// Outcome-conditioned ensemble of battery states.
#[derive(Debug, Clone)]
pub struct ConditionedEnsemble {
    outcomes: Vec<Outcome>,
}

impl ConditionedEnsemble {
    /// The outcomes in measurement order (bath-major for joint measurements).
    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    /// Number of outcomes, including negligible ones.
    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    /// True when there are no outcomes.
    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    /// Sum of all outcome probabilities (should be 1 up to round-off).
    pub fn total_probability(&self) -> f64 {
        self.outcomes.iter().map(|o| o.probability).sum()
    }

    /// Probability-weighted average of the non-negligible conditioned states.
    pub fn average_state(&self) -> Result<DensityOperator> {
        let dims = self
            .outcomes
            .first()
            .map(|o| o.state.dims().to_vec())
            .ok_or_else(|| Error::InvalidValue("empty ensemble".into()))?;
        let d: usize = dims.iter().product();
        let mut mat = DMatrix::<Complex64>::zeros(d, d);
        for o in self.outcomes.iter().filter(|o| !o.negligible) {
            mat += o.state.matrix().scale(o.probability);
        }
        DensityOperator::repaired(dims, mat)
    }
}

fn conditioned_outcome(dims: Vec<usize>, m: DMatrix<Complex64>) -> Outcome {
    let p = m.trace().re;
    if p < tol::NEGLIGIBLE_PROB {
        let state =
            DensityOperator::maximally_mixed(dims).expect("placeholder state dims are valid");
        return Outcome {
            probability: p.max(0.0),
            state,
            negligible: true,
        };
    }
    let state = DensityOperator::repaired(dims, m.unscale(p))
        .expect("conditioned matrix has positive trace");
    Outcome {
        probability: p,
        state,
        negligible: false,
    }
}

/// Conditions the channel output on a measurement of the bath alone.
///
/// `sigma` must live on (s, b, R); element E_k of the POVM acts on b.
/// Outcome k carries p_k = Tr[(I⊗E_k⊗I)σ] and the battery state
/// Tr_{bR}[(I⊗E_k⊗I)σ]/p_k.
pub fn condition_weak(sigma: &DensityOperator, povm: &Povm) -> Result<ConditionedEnsemble> {
    if sigma.dims().len() != 3 {
        return Err(Error::DimensionMismatch(format!(
            "expected a (s, b, R) state, got {} subsystems",
            sigma.dims().len()
        )));
    }
    let (ds, db, dr) = (sigma.dims()[0], sigma.dims()[1], sigma.dims()[2]);
    if povm.dim() != db {
        return Err(Error::DimensionMismatch(format!(
            "POVM dimension {} vs bath dimension {db}",
            povm.dim()
        )));
    }
    let mat = sigma.matrix();
    let flat = |i: usize, m: usize, r: usize| (i * db + m) * dr + r;
    let outcomes = povm
        .elements()
        .iter()
        .map(|e| {
            // M[i,j] = Σ_{m,m',r} E[m,m'] σ[(i,m',r),(j,m,r)].
            let mut out = DMatrix::<Complex64>::zeros(ds, ds);
            for i in 0..ds {
                for j in 0..ds {
                    let mut acc = Complex64::ZERO;
                    for m in 0..db {
                        for mp in 0..db {
                            let emm = e[(m, mp)];
                            if emm == Complex64::ZERO {
                                continue;
                            }
                            for r in 0..dr {
                                acc += emm * mat[(flat(i, mp, r), flat(j, m, r))];
                            }
                        }
                    }
                    out[(i, j)] = acc;
                }
            }
            conditioned_outcome(vec![ds], out)
        })
        .collect();
    Ok(ConditionedEnsemble { outcomes })
}

/// Conditions the channel output on separate measurements of bath and
/// reference.
///
/// Outcomes are ordered bath-major: (k, l) ↦ k·len(povm_r) + l.
pub fn condition_strong(
    sigma: &DensityOperator,
    povm_b: &Povm,
    povm_r: &Povm,
) -> Result<ConditionedEnsemble> {
    if sigma.dims().len() != 3 {
        return Err(Error::DimensionMismatch(format!(
            "expected a (s, b, R) state, got {} subsystems",
            sigma.dims().len()
        )));
    }
    let (ds, db, dr) = (sigma.dims()[0], sigma.dims()[1], sigma.dims()[2]);
    if povm_b.dim() != db || povm_r.dim() != dr {
        return Err(Error::DimensionMismatch(format!(
            "POVM dimensions ({}, {}) vs (bath, reference) dimensions ({db}, {dr})",
            povm_b.dim(),
            povm_r.dim()
        )));
    }
    let mat = sigma.matrix();
    let flat = |i: usize, m: usize, r: usize| (i * db + m) * dr + r;
    let mut outcomes = Vec::with_capacity(povm_b.len() * povm_r.len());
    for eb in povm_b.elements() {
        for er in povm_r.elements() {
            // M[i,j] = Σ_{m,m',r,r'} E_b[m,m'] E_r[r,r'] σ[(i,m',r'),(j,m,r)].
            let mut out = DMatrix::<Complex64>::zeros(ds, ds);
            for i in 0..ds {
                for j in 0..ds {
                    let mut acc = Complex64::ZERO;
                    for m in 0..db {
                        for mp in 0..db {
                            let ebv = eb[(m, mp)];
                            if ebv == Complex64::ZERO {
                                continue;
                            }
                            for r in 0..dr {
                                for rp in 0..dr {
                                    let erv = er[(r, rp)];
                                    if erv == Complex64::ZERO {
                                        continue;
                                    }
                                    acc += ebv * erv * mat[(flat(i, mp, rp), flat(j, m, r))];
                                }
                            }
                        }
                    }
                    out[(i, j)] = acc;
                }
            }
            outcomes.push(conditioned_outcome(vec![ds], out));
        }
    }
    Ok(ConditionedEnsemble { outcomes })
}
