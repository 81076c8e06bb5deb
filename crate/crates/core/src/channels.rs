//! Genuinely incoherent operations (GIO) as Schur channels.
//!
//! A GIO is fully characterized by a correlation matrix `tau` (Hermitian PSD,
//! unit diagonal) acting entrywise: `rho -> tau o rho`. Diagonal-unitary
//! conjugation is the rank-one special case `tau = |nu><nu|` with unimodular
//! `nu`.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{CoherenceError, Result};
use crate::linalg::{self, CMat, CVec};
use crate::seeding;
use crate::states::DensityMatrix;

/// PSD tolerance for correlation-matrix validation.
pub const CORRELATION_PSD_TOL: f64 = 1e-9;
/// Allowed deviation of each diagonal entry from 1.
pub const UNIT_DIAGONAL_TOL: f64 = 1e-10;
/// Off-diagonal entries with modulus at or below this are treated as absent
/// in the phase-alignability support graph.
pub const SUPPORT_CUTOFF: f64 = 1e-12;
/// Cycle-consistency tolerance (radians) for phase alignability.
pub const CYCLE_TOL: f64 = 1e-8;

/// PSD complex matrix with unit diagonal; parameterizes a GIO one-to-one.
#[derive(Debug, Clone)]
pub struct CorrelationMatrix {
    matrix: CMat,
}

impl CorrelationMatrix {
    pub fn new(matrix: CMat) -> Result<Self> {
        Self::with_psd_tol(matrix, CORRELATION_PSD_TOL)
    }

    /// Validation with a caller-chosen PSD tolerance (the SDP dual
    /// certificate is checked at a looser 1e-7).
    pub fn with_psd_tol(matrix: CMat, psd_tol: f64) -> Result<Self> {
        let h = linalg::hermitize(&matrix)?;
        let mut worst = 0.0f64;
        for i in 0..h.nrows() {
            let dev = (h[(i, i)] - Complex64::new(1.0, 0.0)).norm();
            if dev > worst {
                worst = dev;
            }
        }
        if worst > UNIT_DIAGONAL_TOL {
            return Err(CoherenceError::NotUnitDiagonal { deviation: worst });
        }
        let min_eig = linalg::eigh(&h)?.min_eigenvalue();
        if min_eig < -psd_tol {
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

    /// The adjoint channel's correlation matrix, `tau^T`.
    pub fn transposed(&self) -> Self {
        Self {
            matrix: self.matrix.transpose(),
        }
    }
}

/// Phases of a diagonal unitary `U = diag(e^{i theta_i})`, with the global
/// phase fixed by `theta_0 = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseVector {
    thetas: Vec<f64>,
}

impl PhaseVector {
    pub fn new(thetas: Vec<f64>) -> Result<Self> {
        if thetas.is_empty() {
            return Err(CoherenceError::InvalidParameter(
                "phase vector must be nonempty".into(),
            ));
        }
        if thetas[0] != 0.0 {
            return Err(CoherenceError::InvalidParameter(format!(
                "theta_0 must be exactly 0 (global-phase gauge), got {}",
                thetas[0]
            )));
        }
        Ok(Self { thetas })
    }

    /// Builds from the d-1 free phases, prepending the gauge-fixed zero.
    pub fn from_free(free: &[f64]) -> Self {
        let mut thetas = Vec::with_capacity(free.len() + 1);
        thetas.push(0.0);
        thetas.extend_from_slice(free);
        Self { thetas }
    }

    pub fn zero(d: usize) -> Self {
        Self {
            thetas: vec![0.0; d],
        }
    }

    pub fn dim(&self) -> usize {
        self.thetas.len()
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    /// The d-1 free phases (everything after the fixed `theta_0`).
    pub fn free(&self) -> &[f64] {
        &self.thetas[1..]
    }

    /// Phases of the inverse unitary.
    pub fn negated(&self) -> Self {
        Self {
            thetas: self.thetas.iter().map(|t| -t).collect(),
        }
    }

    /// The unimodular vector `nu_i = e^{i theta_i}`.
    pub fn unimodular_vector(&self) -> CVec {
        CVec::from_fn(self.thetas.len(), |i, _| {
            Complex64::from_polar(1.0, self.thetas[i])
        })
    }
}

/// Completely dephasing channel: keeps the diagonal, zeroes everything else.
pub fn dephase(rho: &DensityMatrix) -> Result<DensityMatrix> {
    let d = rho.dim();
    let m = CMat::from_fn(d, d, |i, j| {
        if i == j {
            rho.entry(i, i)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    DensityMatrix::new(m)
}

/// Applies the GIO with correlation matrix `tau`: `rho -> tau o rho`.
pub fn apply_gio(tau: &CorrelationMatrix, rho: &DensityMatrix) -> Result<DensityMatrix> {
    if tau.dim() != rho.dim() {
        return Err(CoherenceError::DimensionMismatch {
            left: tau.dim(),
            right: rho.dim(),
        });
    }
    DensityMatrix::new(linalg::schur_product(tau.matrix(), rho.matrix())?)
}

/// Conjugation by the diagonal unitary `U = diag(e^{i theta_i})`:
/// entry (i,j) picks up `e^{i(theta_i - theta_j)}`.
pub fn phase_unitary_conjugate(theta: &PhaseVector, rho: &DensityMatrix) -> Result<DensityMatrix> {
    if theta.dim() != rho.dim() {
        return Err(CoherenceError::DimensionMismatch {
            left: theta.dim(),
            right: rho.dim(),
        });
    }
    let d = rho.dim();
    let t = theta.thetas();
    let m = CMat::from_fn(d, d, |i, j| {
        rho.entry(i, j) * Complex64::from_polar(1.0, t[i] - t[j])
    });
    DensityMatrix::new(m)
}

/// Correlation matrix sampled as the Gram matrix of `d` random unit vectors
/// in C^rank. Unit diagonal holds exactly by construction; matrix rank is at
/// most `rank`. Rank 1 yields a pure diagonal-unitary channel.
pub fn random_correlation_matrix(d: usize, rank: usize, seed: u64) -> Result<CorrelationMatrix> {
    if rank == 0 || rank > d {
        return Err(CoherenceError::InvalidParameter(format!(
            "rank must lie in 1..={d}, got {rank}"
        )));
    }
    let mut rng = seeding::rng_from_seed(seed);
    let mut vectors: Vec<CVec> = Vec::with_capacity(d);
    for _ in 0..d {
        let mut v = CVec::from_fn(rank, |_, _| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re, im)
        });
        let norm = v.norm();
        v /= Complex64::new(norm, 0.0);
        vectors.push(v);
    }
    let mut m = CMat::from_fn(d, d, |i, j| vectors[i].dotc(&vectors[j]));
    for i in 0..d {
        m[(i, i)] = Complex64::new(1.0, 0.0);
    }
    CorrelationMatrix::new(m)
}

fn wrap_angle(x: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut y = x % two_pi;
    if y > std::f64::consts::PI {
        y -= two_pi;
    } else if y < -std::f64::consts::PI {
        y += two_pi;
    }
    y
}

/// Searches for phases with `arg(rho_ij) = theta_i - theta_j (mod 2 pi)` on
/// every supported entry. Assigns phases along a BFS spanning forest of the
/// support graph, then checks every remaining edge for cycle consistency
/// within [`CYCLE_TOL`] radians. Returns `None` if no assignment exists.
pub fn is_phase_alignable(rho: &DensityMatrix) -> Option<PhaseVector> {
    let d = rho.dim();
    let mut thetas = vec![0.0f64; d];
    let mut assigned = vec![false; d];
    for root in 0..d {
        if assigned[root] {
            continue;
        }
        assigned[root] = true;
        thetas[root] = 0.0;
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(i) = queue.pop_front() {
            for j in 0..d {
                if assigned[j] || i == j || rho.entry(i, j).norm() <= SUPPORT_CUTOFF {
                    continue;
                }
                // theta_i - theta_j = arg(rho_ij)
                thetas[j] = thetas[i] - rho.entry(i, j).arg();
                assigned[j] = true;
                queue.push_back(j);
            }
        }
    }
    for i in 0..d {
        for j in (i + 1)..d {
            let z = rho.entry(i, j);
            if z.norm() <= SUPPORT_CUTOFF {
                continue;
            }
            if wrap_angle(z.arg() - (thetas[i] - thetas[j])).abs() > CYCLE_TOL {
                return None;
            }
        }
    }
    let gauge = thetas[0];
    let mut out: Vec<f64> = thetas.iter().map(|t| t - gauge).collect();
    out[0] = 0.0;
    Some(PhaseVector::new(out).expect("gauge fixed"))
}
