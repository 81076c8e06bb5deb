//! Dense complex linear-algebra kernel.
//!
//! Everything here operates on `DMatrix<Complex64>` (aliased as [`CMat`]).
//! Higher-level modules wrap these in validated domain types; this module
//! only cares about the raw numerics: Hermitian eigendecomposition, PSD
//! tests, the Schur (entrywise) product and the Fourier matrix.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{CoherenceError, Result};

/// Dense complex matrix, the raw carrier for states, channels and unitaries.
pub type CMat = DMatrix<Complex64>;
/// Dense complex column vector.
pub type CVec = DVector<Complex64>;

/// Asymmetry below this is treated as floating-point noise and symmetrized away.
pub const HERMITICITY_TOL: f64 = 1e-10;

/// Largest entrywise deviation of `a` from its conjugate transpose.
pub fn hermiticity_defect(a: &CMat) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            let d = (a[(i, j)] - a[(j, i)].conj()).norm();
            if d > worst {
                worst = d;
            }
        }
    }
    worst
}

/// Checks squareness and Hermiticity, then returns the exactly Hermitian
/// part `(A + A^H)/2`. Rejects matrices whose asymmetry exceeds
/// [`HERMITICITY_TOL`].
pub fn hermitize(a: &CMat) -> Result<CMat> {
    if a.nrows() != a.ncols() {
        return Err(CoherenceError::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    let defect = hermiticity_defect(a);
    if defect > HERMITICITY_TOL {
        return Err(CoherenceError::NotHermitian { asymmetry: defect });
    }
    Ok((a + a.adjoint()) * Complex64::new(0.5, 0.0))
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues are real and sorted ascending; `eigenvectors` holds the
/// matching orthonormal eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMat,
}

impl HermitianEigen {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues[self.eigenvalues.len() - 1]
    }

    /// Rebuilds `V diag(lambda) V^H`.
    pub fn reconstruct(&self) -> CMat {
        let d = self.dim();
        let lambda = CMat::from_fn(d, d, |i, j| {
            if i == j {
                Complex64::new(self.eigenvalues[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        &self.eigenvectors * lambda * self.eigenvectors.adjoint()
    }
}

/// Hermitian eigendecomposition via tridiagonalization + QR iteration
/// (nalgebra's `SymmetricEigen`). Input is validated and symmetrized first.
pub fn eigh(a: &CMat) -> Result<HermitianEigen> {
    let h = hermitize(a)?;
    let d = h.nrows();
    let se = nalgebra::SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| se.eigenvalues[i].partial_cmp(&se.eigenvalues[j]).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let eigenvectors = CMat::from_fn(d, d, |i, j| se.eigenvectors[(i, order[j])]);
    Ok(HermitianEigen {
        eigenvalues,
        eigenvectors,
    })
}

/// True iff the minimum eigenvalue of the Hermitian matrix `a` is `>= -tol`.
pub fn is_psd(a: &CMat, tol: f64) -> Result<bool> {
    Ok(eigh(a)?.min_eigenvalue() >= -tol)
}

/// Entrywise (Schur/Hadamard) product.
pub fn schur_product(a: &CMat, b: &CMat) -> Result<CMat> {
    if a.nrows() != b.nrows() || a.ncols() != b.ncols() {
        return Err(CoherenceError::DimensionMismatch {
            left: a.nrows(),
            right: b.nrows(),
        });
    }
    Ok(CMat::from_fn(a.nrows(), a.ncols(), |i, j| {
        a[(i, j)] * b[(i, j)]
    }))
}

/// Fourier matrix `F_ij = omega^(ij)/sqrt(d)` with `omega = exp(2 pi i / d)`.
///
/// Unitary; column 0 is the uniform-amplitude maximally coherent state.
pub fn fourier_matrix(d: usize) -> CMat {
    let scale = 1.0 / (d as f64).sqrt();
    CMat::from_fn(d, d, |i, j| {
        let phase = 2.0 * std::f64::consts::PI * (i as f64) * (j as f64) / (d as f64);
        Complex64::from_polar(scale, phase)
    })
}

/// Spectral norm (largest singular value). For Hermitian input this is the
/// largest absolute eigenvalue, which is how it is computed here.
pub fn spectral_norm_hermitian(a: &CMat) -> Result<f64> {
    let eig = eigh(a)?;
    Ok(eig
        .eigenvalues
        .iter()
        .fold(0.0f64, |acc, &l| acc.max(l.abs())))
}

/// Max entrywise modulus, used for relative reconstruction error bounds.
pub fn max_abs_entry(a: &CMat) -> f64 {
    a.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}
