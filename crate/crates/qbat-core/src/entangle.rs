//! Entanglement of formation across a bipartition.
//!
//! E_f(ρ) = min Σ_i q_i S(Tr_B |φ_i⟩⟨φ_i|) over all pure-state decompositions
//! ρ = Σ_i q_i |φ_i⟩⟨φ_i|, in nats. Three routes:
//!
//! - [`eof_pure`]: exact for pure states (entropy of the reduced state).
//! - [`eof_wootters`]: exact for two-qubit states via the concurrence
//!   C = max(0, λ₁−λ₂−λ₃−λ₄) of the spin-flipped spectrum, with
//!   E_f = h((1+√(1−C²))/2) and h the binary entropy in nats.
//! - [`eof_search`]: a seeded minimization over decomposition isometries for
//!   anything small enough; returns a certified-false upper bound.
//!
//! Decompositions of a rank-r state correspond to isometries T (m×r columns
//! of a unitary): |φ̃_i⟩ = Σ_j T_ij √λ_j |e_j⟩ over the eigenpairs of ρ, with
//! q_i = ‖φ̃_i‖². The search parameterizes T by Givens products and minimizes
//! the average marginal entropy with restarted Nelder–Mead.

use crate::error::{Error, Result};
use crate::linalg;
use crate::optim;
use crate::random::derive_seed;
use crate::state::{DensityOperator, StateVector};
use crate::tol;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

/// How an entanglement-of-formation value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EofMethod {
    /// Exact reduction of a pure state.
    PureReduction,
    /// Exact two-qubit concurrence formula.
    Wootters,
    /// Numerical minimization over decompositions.
    DecompositionSearch,
}

/// An entanglement-of-formation value with its provenance.
#[derive(Debug, Clone)]
pub struct EofResult {
    /// Value in nats.
    pub value: f64,
    /// Route that produced the value.
    pub method: EofMethod,
    /// True when the value is exact (up to round-off) rather than an upper
    /// bound from an incomplete search.
    pub certified: bool,
    /// The achieving decomposition (weights and pure states on the input's
    /// subsystem list), when one is available.
    pub decomposition: Option<Vec<(f64, StateVector)>>,
}

/// Binary entropy −p ln p − (1−p) ln(1−p) in nats; zero at the endpoints.
pub fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -p * p.ln() - (1.0 - p) * (1.0 - p).ln()
}

fn check_two_qubit(rho: &DensityOperator) -> Result<()> {
    if rho.dims() != [2, 2] {
        return Err(Error::DimensionMismatch(format!(
            "two-qubit formula needs dims [2, 2], got {:?}",
            rho.dims()
        )));
    }
    Ok(())
}

/// Wootters concurrence of a two-qubit state.
///
/// C = max(0, λ₁−λ₂−λ₃−λ₄) where λ are the square roots of the eigenvalues
/// of ρ ρ̃ (descending) and ρ̃ = (σ_y⊗σ_y) ρ* (σ_y⊗σ_y). With ρ = X X†
/// factored through the spectral cut, those λ equal the singular values of
/// the complex symmetric matrix B = Xᵀ (σ_y⊗σ_y) X; working with B keeps
/// round-off in the near-zero part of the spectrum out of the subtraction.
pub fn concurrence(rho: &DensityOperator) -> Result<f64> {
    check_two_qubit(rho)?;
    let (vals, vecs) = linalg::hermitian_eigen(rho.matrix());
    let mut cols: Vec<DVector<Complex64>> = Vec::new();
    for k in 0..4 {
        if vals[k] > tol::SPECTRUM_CUT {
            let w = vals[k].sqrt();
            cols.push(DVector::from_iterator(
                4,
                vecs.column(k).iter().map(|z| z * w),
            ));
        }
    }
    if cols.is_empty() {
        return Err(Error::InvalidState("state has no spectral weight".into()));
    }
    // σ_y⊗σ_y acts as v ↦ (−v₃, v₂, v₁, −v₀).
    let yyv = |v: &DVector<Complex64>| DVector::from_vec(vec![-v[3], v[2], v[1], -v[0]]);
    let r = cols.len();
    let mut b = DMatrix::<Complex64>::zeros(r, r);
    for j in 0..r {
        let yj = yyv(&cols[j]);
        for i in 0..r {
            let mut acc = Complex64::ZERO;
            for k in 0..4 {
                // Transpose, not adjoint: Bᵢⱼ = Σ_k X[k,i] (σ_y⊗σ_y X)[k,j].
                acc += cols[i][k] * yj[k];
            }
            b[(i, j)] = acc;
        }
    }
    let mut lambdas: Vec<f64> = if r == 1 {
        vec![b[(0, 0)].norm()]
    } else {
        let btb = b.adjoint() * &b;
        linalg::hermitian_eigenvalues(&btb)
            .into_iter()
            .map(|v| v.max(0.0).sqrt())
            .collect()
    };
    lambdas.sort_by(|a, b| b.total_cmp(a));
    Ok((2.0 * lambdas[0] - lambdas.iter().sum::<f64>()).max(0.0))
}

/// Exact two-qubit entanglement of formation, h((1+√(1−C²))/2) in nats.
pub fn eof_wootters(rho: &DensityOperator) -> Result<EofResult> {
    let c = concurrence(rho)?;
    let x = 0.5 * (1.0 + (1.0 - c * c).max(0.0).sqrt());
    Ok(EofResult {
        value: binary_entropy(x),
        method: EofMethod::Wootters,
        certified: true,
        decomposition: None,
    })
}

fn check_cut(dims: &[usize], cut: &[usize]) -> Result<()> {
    if cut.is_empty() || cut.len() >= dims.len() {
        return Err(Error::InvalidValue(
            "cut must be a nonempty proper subset of the subsystems".into(),
        ));
    }
    if cut.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidValue(
            "cut must be strictly increasing".into(),
        ));
    }
    if *cut.last().unwrap() >= dims.len() {
        return Err(Error::DimensionMismatch(format!(
            "cut index {} out of range for {} subsystems",
            cut.last().unwrap(),
            dims.len()
        )));
    }
    Ok(())
}

/// Entanglement of formation of a pure state across `cut`: the entropy of
/// the reduced state on the cut side.
pub fn eof_pure(psi: &StateVector, cut: &[usize]) -> Result<EofResult> {
    check_cut(psi.dims(), cut)?;
    let value = psi.reduced(cut)?.vn_entropy();
    Ok(EofResult {
        value,
        method: EofMethod::PureReduction,
        certified: true,
        decomposition: Some(vec![(1.0, psi.clone())]),
    })
}

/// Configuration for [`eof_search`].
#[derive(Debug, Clone)]
pub struct EofSearchConfig {
    /// Independent Nelder–Mead starts per decomposition size.
    pub restarts: usize,
    /// Iteration cap per start.
    pub max_iters: usize,
    /// Value-spread termination tolerance.
    pub tol: f64,
    /// Base seed for the restart starting points.
    pub seed: u64,
    /// Decomposition size override. `None` tries rank and min(2·rank, rank²)
    /// elements and keeps the better; values are clamped to at least the rank
    /// and at most rank².
    pub elements: Option<usize>,
}

impl Default for EofSearchConfig {
    fn default() -> Self {
        Self {
            restarts: 16,
            max_iters: 1500,
            tol: 1e-9,
            seed: 0,
            elements: None,
        }
    }
}

/// Upper bound on the entanglement of formation across `cut` by seeded
/// minimization over pure-state decompositions.
///
/// Supports total dimension ≤ 16. Exact (and certified) for rank-one states,
/// where every decomposition reduces to the single eigenvector; otherwise
/// `certified` is false and the value is an upper bound that a larger search
/// could in principle improve.
pub fn eof_search(
    rho: &DensityOperator,
    cut: &[usize],
    cfg: &EofSearchConfig,
) -> Result<EofResult> {
    check_cut(rho.dims(), cut)?;
    let d = rho.total_dim();
    if d > 16 {
        return Err(Error::Unsupported(format!(
            "decomposition search supports total dimension ≤ 16, got {d}"
        )));
    }
    if cfg.restarts == 0 || cfg.max_iters == 0 {
        return Err(Error::InvalidValue(
            "search needs at least one restart and one iteration".into(),
        ));
    }

    let (vals, vecs) = linalg::hermitian_eigen(rho.matrix());
    // Weighted eigenvectors w_j = √λ_j |e_j⟩, largest first.
    let mut weighted: Vec<DVector<Complex64>> = Vec::new();
    for k in (0..d).rev() {
        if vals[k] > tol::SPECTRUM_CUT {
            let w = vals[k].sqrt();
            weighted.push(DVector::from_iterator(
                d,
                vecs.column(k).iter().map(|z| z * w),
            ));
        }
    }
    let rank = weighted.len().max(1);
    if weighted.is_empty() {
        return Err(Error::InvalidState("state has no spectral weight".into()));
    }

    // Flat-index table for reducing a full vector onto the cut side.
    let dims = rho.dims();
    let cut_dims: Vec<usize> = cut.iter().map(|&i| dims[i]).collect();
    let rest: Vec<usize> = (0..dims.len()).filter(|i| !cut.contains(i)).collect();
    let rest_dims: Vec<usize> = rest.iter().map(|&i| dims[i]).collect();
    let da: usize = cut_dims.iter().product();
    let db: usize = rest_dims.iter().product();
    let position = build_position_table(dims, cut, &rest);

    // Average marginal entropy of the decomposition generated by the m×rank
    // isometry taken from a Givens unitary; probabilities stay folded into
    // the unnormalized marginals (Σ ν ln ν bookkeeping handles q_i exactly).
    let objective = |params: &[f64], m: usize| -> f64 {
        let u = linalg::givens_unitary(m, params);
        let mut total = 0.0;
        for i in 0..m {
            let mut phi = DVector::<Complex64>::zeros(d);
            for (j, w) in weighted.iter().enumerate() {
                let t = u[(i, j)];
                if t != Complex64::ZERO {
                    phi.axpy(t, w, Complex64::ONE);
                }
            }
            let q = phi.norm_squared();
            if q < tol::NEGLIGIBLE_PROB {
                continue;
            }
            let marginal = reduce_vector(&phi, da, db, &position);
            let spectrum = linalg::hermitian_eigenvalues(&marginal);
            total += linalg::spectrum_entropy(&spectrum) + q * q.ln();
        }
        total
    };

    if rank == 1 {
        // Single eigenvector: the decomposition is unique.
        let phi = weighted[0].clone();
        let norm = phi.norm();
        let psi = StateVector::from_dvector(dims.to_vec(), phi.unscale(norm))
            .expect("dominant eigenvector is normalized");
        let value = psi.reduced(cut)?.vn_entropy();
        return Ok(EofResult {
            value,
            method: EofMethod::DecompositionSearch,
            certified: true,
            decomposition: Some(vec![(1.0, psi)]),
        });
    }

    let sizes: Vec<usize> = match cfg.elements {
        Some(m) => vec![m.clamp(rank, rank * rank)],
        None => {
            let mut s = vec![rank, (2 * rank).min(rank * rank)];
            s.dedup();
            s
        }
    };

    let mut best_value = f64::INFINITY;
    let mut best: Option<(usize, Vec<f64>)> = None;
    for (si, &m) in sizes.iter().enumerate() {
        let nparams = linalg::givens_param_count(m);
        let opts = optim::NmOptions {
            max_iters: cfg.max_iters,
            ftol: cfg.tol,
            step: 0.4,
        };
        for r in 0..cfg.restarts {
            let x0: Vec<f64> = if r == 0 {
                vec![0.0; nparams]
            } else {
                let mut rng =
                    crate::random::rng_from(derive_seed(cfg.seed, (si * 10_007 + r) as u64));
                (0..nparams)
                    .map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI))
                    .collect()
            };
            let run = optim::minimize(|x| objective(x, m), &x0, &opts);
            if run.fx < best_value {
                best_value = run.fx;
                best = Some((m, run.x));
            }
        }
    }

    let (m, params) = best.expect("at least one restart ran");
    let u = linalg::givens_unitary(m, &params);
    let mut decomposition = Vec::new();
    for i in 0..m {
        let mut phi = DVector::<Complex64>::zeros(d);
        for (j, w) in weighted.iter().enumerate() {
            phi.axpy(u[(i, j)], w, Complex64::ONE);
        }
        let q = phi.norm_squared();
        if q < tol::NEGLIGIBLE_PROB {
            continue;
        }
        let psi = StateVector::from_dvector(dims.to_vec(), phi.unscale(q.sqrt()))
            .expect("decomposition member is normalized");
        decomposition.push((q, psi));
    }

    Ok(EofResult {
        value: best_value,
        method: EofMethod::DecompositionSearch,
        certified: false,
        decomposition: Some(decomposition),
    })
}

/// Flat positions indexed `[a·db + b]` mapping (cut index a, rest index b) to
/// the flat index in the original layout.
fn build_position_table(dims: &[usize], cut: &[usize], rest: &[usize]) -> Vec<usize> {
    let mut strides = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    let cut_dims: Vec<usize> = cut.iter().map(|&i| dims[i]).collect();
    let rest_dims: Vec<usize> = rest.iter().map(|&i| dims[i]).collect();
    let offsets = |sub_dims: &[usize], subs: &[usize]| -> Vec<usize> {
        let count: usize = sub_dims.iter().product();
        let mut out = Vec::with_capacity(count.max(1));
        let mut digits = vec![0usize; sub_dims.len()];
        for _ in 0..count.max(1) {
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
    };
    let cut_off = offsets(&cut_dims, cut);
    let rest_off = offsets(&rest_dims, rest);
    let db = rest_off.len();
    let mut table = vec![0usize; cut_off.len() * db];
    for (a, &oa) in cut_off.iter().enumerate() {
        for (b, &ob) in rest_off.iter().enumerate() {
            table[a * db + b] = oa + ob;
        }
    }
    table
}

/// Unnormalized marginal Σ_b φ[a,b] φ̄[a',b] of a vector on the cut side.
fn reduce_vector(
    phi: &DVector<Complex64>,
    da: usize,
    db: usize,
    position: &[usize],
) -> DMatrix<Complex64> {
    let mut m = DMatrix::<Complex64>::zeros(da, da);
    for a in 0..da {
        for ap in 0..da {
            let mut acc = Complex64::ZERO;
            for b in 0..db {
                acc += phi[position[a * db + b]] * phi[position[ap * db + b]].conj();
            }
            m[(a, ap)] = acc;
        }
    }
    m
}
