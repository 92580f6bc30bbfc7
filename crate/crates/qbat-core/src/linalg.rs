//! Small dense complex linear algebra helpers shared across the crate.
//!
//! Everything here operates on `nalgebra` dynamic matrices of `Complex64`.
//! Dimensions in this crate are tiny (total Hilbert-space dimension ≤ 16), so
//! the helpers favor clarity and determinism over asymptotic cleverness.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

/// Eigenvalues and eigenvectors of a Hermitian matrix, eigenvalues ascending.
///
/// The input is symmetrized as (M + M†)/2 first so callers may pass matrices
/// that are Hermitian only up to round-off. Column k of the returned matrix is
/// the eigenvector for eigenvalue k.
pub(crate) fn hermitian_eigen(m: &DMatrix<Complex64>) -> (Vec<f64>, DMatrix<Complex64>) {
    let h = (m + m.adjoint()).scale(0.5);
    let n = h.nrows();
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub(crate) fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    if m.nrows() == 2 {
        let (lo, hi) = eig2(m[(0, 0)].re, m[(1, 1)].re, m[(0, 1)]);
        return vec![lo, hi];
    }
    let h = (m + m.adjoint()).scale(0.5);
    let mut values: Vec<f64> = h.symmetric_eigen().eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    values
}

/// Closed-form eigenvalues (ascending) of the 2×2 Hermitian [[a, c], [c̄, b]].
#[inline]
pub(crate) fn eig2(a: f64, b: f64, c: Complex64) -> (f64, f64) {
    let half_tr = 0.5 * (a + b);
    let half_diff = 0.5 * (a - b);
    let disc = (half_diff * half_diff + c.norm_sqr()).sqrt();
    (half_tr - disc, half_tr + disc)
}

/// Shannon entropy −Σ λ ln λ of an unnormalized nonnegative spectrum, in nats.
///
/// Entries below [`crate::tol::SPECTRUM_CUT`] (including round-off negatives)
/// are dropped.
#[inline]
pub(crate) fn spectrum_entropy(lambdas: &[f64]) -> f64 {
    let mut s = 0.0;
    for &l in lambdas {
        if l > crate::tol::SPECTRUM_CUT {
            s -= l * l.ln();
        }
    }
    s
}

/// Smallest eigenvalue of a Hermitian matrix.
pub(crate) fn min_hermitian_eigenvalue(m: &DMatrix<Complex64>) -> f64 {
    hermitian_eigenvalues(m).first().copied().unwrap_or(0.0)
}

/// Largest absolute entry of a matrix.
pub(crate) fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest absolute entry of M − I.
pub(crate) fn identity_deviation(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j {
                Complex64::ONE
            } else {
                Complex64::ZERO
            };
            dev = dev.max((m[(i, j)] - target).norm());
        }
    }
    dev
}

/// Number of real parameters of [`givens_unitary`] for an n×n unitary.
#[inline]
pub(crate) fn givens_param_count(n: usize) -> usize {
    n * (n - 1)
}

/// Unitary built from a product of two-parameter Givens rotations.
///
/// Pairs (i, j) with i < j are visited in lexicographic order; each consumes
/// (θ, φ) and left-multiplies the rotation that acts on rows i and j as
/// [[cosθ, −e^{iφ} sinθ], [e^{−iφ} sinθ, cosθ]]. With all parameters zero the
/// result is the identity. Together with a diagonal phase matrix this family
/// generates all of U(n); the diagonal factor only rephases rows and columns,
/// which neither rank-one POVM frames nor state-decomposition searches can
/// observe, so it is omitted.
pub(crate) fn givens_unitary(n: usize, params: &[f64]) -> DMatrix<Complex64> {
    assert_eq!(params.len(), givens_param_count(n), "parameter count");
    let mut u = DMatrix::identity(n, n);
    let mut k = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            let (theta, phi) = (params[k], params[k + 1]);
            k += 2;
            let (s, c) = theta.sin_cos();
            let e_pos = Complex64::from_polar(s, phi);
            let e_neg = Complex64::from_polar(s, -phi);
            for col in 0..n {
                let vi = u[(i, col)];
                let vj = u[(j, col)];
                u[(i, col)] = c * vi - e_pos * vj;
                u[(j, col)] = e_neg * vi + c * vj;
            }
        }
    }
    u
}

/// Rank-one POVM frame: rows of the first `d` columns of a Givens unitary.
///
/// Returns `n` unnormalized kets u_k ∈ C^d with Σ_k |u_k⟩⟨u_k| = I_d exactly
/// (up to round-off); ‖u_k‖² is the weight of outcome k. Zero rows are valid
/// and correspond to zero-weight outcomes.
pub(crate) fn povm_frame(n: usize, d: usize, params: &[f64]) -> Vec<DVector<Complex64>> {
    debug_assert!(d <= n);
    let u = givens_unitary(n, params);
    (0..n)
        .map(|k| DVector::from_fn(d, |i, _| u[(k, i)].conj()))
        .collect()
}

/// Haar-distributed random unitary via QR of a complex Ginibre matrix.
///
/// The R-factor's diagonal phases are absorbed into Q so the distribution is
/// exactly Haar rather than QR-convention dependent.
pub(crate) fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<Complex64> {
    let g = DMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::ONE
        };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Stable 64-bit FNV-1a hash; identical across runs, platforms and threads.
///
/// Used wherever a reproducible fingerprint of inputs is needed (instance
/// hashes in verification reports, configuration hashes in CLI output).
pub fn stable_hash64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}
