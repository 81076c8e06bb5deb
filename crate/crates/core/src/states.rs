//! Validated quantum-state types and constructors.
//!
//! [`DensityMatrix`] and [`PureState`] are the universal inputs of the
//! measure computations; every constructor in this module runs full
//! validation on its output.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::channels::PhaseVector;
use crate::error::{CoherenceError, Result};
use crate::linalg::{self, CMat, CVec};
use crate::seeding;

/// Trace deviation allowed for a density matrix.
pub const TRACE_TOL: f64 = 1e-10;
/// Eigenvalue floor for the PSD check of a density matrix.
pub const PSD_TOL: f64 = 1e-9;
/// Norm deviation allowed for a pure state.
pub const NORM_TOL: f64 = 1e-10;

/// Normalized pure state `|psi> = sum_i c_i |i>` in the incoherent basis.
#[derive(Debug, Clone)]
pub struct PureState {
    amplitudes: CVec,
}

impl PureState {
    pub fn new(amplitudes: CVec) -> Result<Self> {
        let norm_sq: f64 = amplitudes.iter().map(|c| c.norm_sqr()).sum();
        if !norm_sq.is_finite() || (norm_sq - 1.0).abs() > NORM_TOL {
            return Err(CoherenceError::NotNormalized { norm_sq });
        }
        Ok(Self { amplitudes })
    }

    pub fn from_slice(amps: &[Complex64]) -> Result<Self> {
        Self::new(CVec::from_column_slice(amps))
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVec {
        &self.amplitudes
    }
}

/// d x d complex Hermitian PSD unit-trace matrix.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    matrix: CMat,
}

impl DensityMatrix {
    /// Validates Hermiticity (symmetrizing sub-tolerance noise), unit trace
    /// and positive semidefiniteness.
    pub fn new(matrix: CMat) -> Result<Self> {
        let h = linalg::hermitize(&matrix)?;
        let trace = h.trace().re;
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(CoherenceError::InvalidTrace { trace });
        }
        let min_eig = linalg::eigh(&h)?.min_eigenvalue();
        if min_eig < -PSD_TOL {
            return Err(CoherenceError::NotPsd {
                min_eigenvalue: min_eig,
            });
        }
        Ok(Self { matrix: h })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.matrix[(i, j)]
    }

    /// Diagonal as real numbers (imaginary parts vanish for Hermitian input).
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.matrix[(i, i)].re).collect()
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    pub fn max_eigenvalue(&self) -> Result<f64> {
        Ok(linalg::eigh(&self.matrix)?.max_eigenvalue())
    }
}

/// Parameters of the one-parameter maximally coherent mixed state family
/// `rho_m = p |phi+><phi+| + (1-p)/d I`.
#[derive(Debug, Clone, Copy)]
pub struct McmsParams {
    pub dim: usize,
    pub p: f64,
}

impl McmsParams {
    pub fn new(dim: usize, p: f64) -> Result<Self> {
        if dim == 0 {
            return Err(CoherenceError::InvalidParameter("dim must be >= 1".into()));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(CoherenceError::InvalidParameter(format!(
                "p must lie in [0,1], got {p}"
            )));
        }
        Ok(Self { dim, p })
    }
}

/// `rho = |psi><psi|`.
pub fn pure_to_density(psi: &PureState) -> Result<DensityMatrix> {
    let v = psi.amplitudes();
    DensityMatrix::new(v * v.adjoint())
}

/// Maximally coherent state `sum_i e^{i theta_i} |i> / sqrt(d)`.
/// With no phases this is the uniform representative `|phi+>`.
pub fn maximally_coherent(d: usize, phases: Option<&PhaseVector>) -> Result<PureState> {
    if d == 0 {
        return Err(CoherenceError::InvalidParameter("dim must be >= 1".into()));
    }
    if let Some(p) = phases {
        if p.dim() != d {
            return Err(CoherenceError::DimensionMismatch {
                left: d,
                right: p.dim(),
            });
        }
    }
    let scale = 1.0 / (d as f64).sqrt();
    let amps = CVec::from_fn(d, |i, _| {
        let theta = phases.map_or(0.0, |p| p.thetas()[i]);
        Complex64::from_polar(scale, theta)
    });
    PureState::new(amps)
}

/// `rho_m = p |phi+><phi+| + (1-p)/d I`: uniform diagonal `1/d`,
/// off-diagonals `p/d`.
pub fn mcms_state(params: McmsParams) -> Result<DensityMatrix> {
    let d = params.dim;
    let m = CMat::from_fn(d, d, |i, j| {
        if i == j {
            Complex64::new(1.0 / d as f64, 0.0)
        } else {
            Complex64::new(params.p / d as f64, 0.0)
        }
    });
    DensityMatrix::new(m)
}

/// Random density matrix from the Ginibre construction
/// `rho = G G^H / tr(G G^H)` with i.i.d. standard complex Gaussian entries
/// (Hilbert-Schmidt measure). Deterministic for a fixed seed.
pub fn random_density(d: usize, seed: u64) -> Result<DensityMatrix> {
    if d < 2 {
        return Err(CoherenceError::InvalidParameter("dim must be >= 2".into()));
    }
    let mut rng = seeding::rng_from_seed(seed);
    let g = CMat::from_fn(d, d, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im)
    });
    let gram = &g * g.adjoint();
    let trace = gram.trace().re;
    DensityMatrix::new(gram / Complex64::new(trace, 0.0))
}

/// Random pure state: a normalized complex Gaussian vector.
pub fn random_pure(d: usize, seed: u64) -> Result<PureState> {
    if d == 0 {
        return Err(CoherenceError::InvalidParameter("dim must be >= 1".into()));
    }
    let mut rng = seeding::rng_from_seed(seed);
    let mut v = CVec::from_fn(d, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im)
    });
    let norm = v.norm();
    v /= Complex64::new(norm, 0.0);
    PureState::new(v)
}

/// One of the four pairwise mutually unbiased qutrit bases. Index 0 is the
/// incoherent (computational) basis; indices 1..3 consist entirely of
/// maximally coherent states built from `omega = exp(2 pi i / 3)`.
pub fn qutrit_mub(index: usize) -> Result<Vec<PureState>> {
    if index > 3 {
        return Err(CoherenceError::IndexOutOfRange { index, max: 3 });
    }
    let one = Complex64::new(1.0, 0.0);
    let w = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
    let w2 = w * w;
    let raw: [[Complex64; 3]; 3] = match index {
        0 => [
            [one, 0.0.into(), 0.0.into()],
            [0.0.into(), one, 0.0.into()],
            [0.0.into(), 0.0.into(), one],
        ],
        1 => [[one, one, one], [one, w, w2], [one, w2, w]],
        2 => [[w, one, one], [one, w, one], [one, one, w]],
        _ => [[w2, one, one], [one, w2, one], [one, one, w2]],
    };
    let scale = if index == 0 {
        1.0
    } else {
        1.0 / 3.0f64.sqrt()
    };
    raw.iter()
        .map(|v| {
            PureState::from_slice(&[
                v[0] * scale,
                v[1] * scale,
                v[2] * scale,
            ])
        })
        .collect()
}

/// Qutrit state `sum_i lambda_i |b_i^(j)><b_i^(j)|` over the MUB with the
/// given index (1..3); an MCMS-class state with the given spectrum.
pub fn mub_mixed_state(basis_index: usize, eigenvalues: [f64; 3]) -> Result<DensityMatrix> {
    if !(1..=3).contains(&basis_index) {
        return Err(CoherenceError::IndexOutOfRange {
            index: basis_index,
            max: 3,
        });
    }
    let sum: f64 = eigenvalues.iter().sum();
    if eigenvalues.iter().any(|&l| l < 0.0) || (sum - 1.0).abs() > 1e-10 {
        return Err(CoherenceError::InvalidParameter(format!(
            "spectrum must be nonnegative and sum to 1, got {eigenvalues:?}"
        )));
    }
    let basis = qutrit_mub(basis_index)?;
    let mut m = CMat::zeros(3, 3);
    for (l, b) in eigenvalues.iter().zip(&basis) {
        let v = b.amplitudes();
        m += (v * v.adjoint()) * Complex64::new(*l, 0.0);
    }
    DensityMatrix::new(m)
}
