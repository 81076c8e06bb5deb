//! Coherence fraction `C_F` via multi-start phase optimization.
//!
//! `C_F(rho) = max <phi|rho|phi>` over maximally coherent states, which
//! reduces to maximizing
//!
//! `f(theta) = sum_{i<j} Re(rho_ij) cos(theta_i - theta_j)
//!           + Im(rho_ij) sin(theta_i - theta_j)`
//!
//! over d-1 free phases (theta_0 = 0), with `C_F = (1 + 2 max f)/d`.
//! The objective is smooth and periodic but multi-peaked, so a single local
//! ascent is not enough; we run gradient ascent with Armijo backtracking
//! from many random starts plus one heuristic start that is exact for pure
//! states.

use rand::Rng;

use crate::channels::PhaseVector;
use crate::error::{CoherenceError, Result};
use crate::seeding;
use crate::states::DensityMatrix;

/// Settings for the multi-start C_F optimizer.
#[derive(Debug, Clone)]
pub struct CfConfig {
    /// Number of uniform-random starts; `None` selects `max(50, 20 (d-1))`.
    pub starts: Option<usize>,
    pub seed: u64,
    pub max_iterations: usize,
    /// Stop a local ascent when the sup-norm of the gradient drops below this.
    pub gradient_tol: f64,
    pub armijo_initial_step: f64,
    pub armijo_shrink: f64,
    pub armijo_sufficient_increase: f64,
}

impl Default for CfConfig {
    fn default() -> Self {
        Self {
            starts: None,
            seed: 0,
            max_iterations: 500,
            gradient_tol: 1e-10,
            armijo_initial_step: 1.0,
            armijo_shrink: 0.5,
            armijo_sufficient_increase: 1e-4,
        }
    }
}

impl CfConfig {
    pub fn effective_starts(&self, d: usize) -> usize {
        self.starts.unwrap_or_else(|| 50.max(20 * (d.saturating_sub(1))))
    }
}

/// Result of a C_F computation with its optimality data.
#[derive(Debug, Clone)]
pub struct CfReport {
    /// `C_F` value, in `[1/d, 1]`.
    pub value: f64,
    pub optimal_phases: PhaseVector,
    pub starts_used: usize,
    /// The raw objective maximum; `value = (1 + 2 best_objective_f)/d`.
    pub best_objective_f: f64,
}

/// The phase objective `f(theta)`.
pub fn cf_objective(rho: &DensityMatrix, theta: &PhaseVector) -> Result<f64> {
    if theta.dim() != rho.dim() {
        return Err(CoherenceError::DimensionMismatch {
            left: rho.dim(),
            right: theta.dim(),
        });
    }
    let d = rho.dim();
    let t = theta.thetas();
    let mut f = 0.0;
    for i in 0..d {
        for j in (i + 1)..d {
            let z = rho.entry(i, j);
            let dt = t[i] - t[j];
            f += z.re * dt.cos() + z.im * dt.sin();
        }
    }
    Ok(f)
}

/// Analytic gradient `df/dtheta_k` for the `d-1` free phases `k = 1..d-1`.
pub fn cf_gradient(rho: &DensityMatrix, theta: &PhaseVector) -> Result<Vec<f64>> {
    if theta.dim() != rho.dim() {
        return Err(CoherenceError::DimensionMismatch {
            left: rho.dim(),
            right: theta.dim(),
        });
    }
    let d = rho.dim();
    let t = theta.thetas();
    let mut grad = vec![0.0f64; d - 1];
    for k in 1..d {
        let mut g = 0.0;
        for j in 0..d {
            if j == k {
                continue;
            }
            let z = rho.entry(k, j);
            let dt = t[k] - t[j];
            g += z.im * dt.cos() - z.re * dt.sin();
        }
        grad[k - 1] = g;
    }
    Ok(grad)
}

fn ascend(
    rho: &DensityMatrix,
    start: &[f64],
    config: &CfConfig,
) -> Result<(Vec<f64>, f64)> {
    let mut free = start.to_vec();
    let mut theta = PhaseVector::from_free(&free);
    let mut f = cf_objective(rho, &theta)?;
    for _ in 0..config.max_iterations {
        let grad = cf_gradient(rho, &theta)?;
        let sup = grad.iter().fold(0.0f64, |a, g| a.max(g.abs()));
        if sup <= config.gradient_tol {
            break;
        }
        let grad_norm_sq: f64 = grad.iter().map(|g| g * g).sum();
        let mut step = config.armijo_initial_step;
        let mut advanced = false;
        while step > 1e-16 {
            let trial: Vec<f64> = free
                .iter()
                .zip(&grad)
                .map(|(t, g)| t + step * g)
                .collect();
            let trial_theta = PhaseVector::from_free(&trial);
            let trial_f = cf_objective(rho, &trial_theta)?;
            if trial_f >= f + config.armijo_sufficient_increase * step * grad_norm_sq {
                free = trial;
                theta = trial_theta;
                f = trial_f;
                advanced = true;
                break;
            }
            step *= config.armijo_shrink;
        }
        if !advanced {
            break;
        }
    }
    Ok((free, f))
}

/// Multi-start global maximization of `f(theta)`.
///
/// Deterministic for a fixed config: starts are drawn from a seeded stream
/// and ties between equal-value maxima keep the lowest start index.
pub fn coherence_fraction(rho: &DensityMatrix, config: &CfConfig) -> Result<CfReport> {
    let d = rho.dim();
    if d == 1 {
        return Ok(CfReport {
            value: 1.0,
            optimal_phases: PhaseVector::zero(1),
            starts_used: 0,
            best_objective_f: 0.0,
        });
    }
    let n_random = config.effective_starts(d);
    let mut rng = seeding::rng_from_seed(config.seed);

    // heuristic start: exact for pure states
    let mut starts: Vec<Vec<f64>> = Vec::with_capacity(n_random + 1);
    let heuristic: Vec<f64> = (1..d)
        .map(|i| {
            let z = rho.entry(i, 0);
            if z.norm() > 1e-12 {
                z.arg()
            } else {
                0.0
            }
        })
        .collect();
    starts.push(heuristic);
    for _ in 0..n_random {
        starts.push(
            (1..d)
                .map(|_| rng.gen::<f64>() * 2.0 * std::f64::consts::PI)
                .collect(),
        );
    }

    let mut best_f = f64::NEG_INFINITY;
    let mut best_free: Vec<f64> = vec![0.0; d - 1];
    for start in &starts {
        let (free, f) = ascend(rho, start, config)?;
        if f > best_f {
            best_f = f;
            best_free = free;
        }
    }

    let optimal_phases = PhaseVector::from_free(&best_free);
    Ok(CfReport {
        value: (1.0 + 2.0 * best_f) / d as f64,
        optimal_phases,
        starts_used: starts.len(),
        best_objective_f: best_f,
    })
}

/// Closed form `C_F(|psi>) = (sum_i |c_i|)^2 / d` for pure states.
pub fn cf_pure_closed_form(psi: &crate::states::PureState) -> f64 {
    let s: f64 = psi.amplitudes().iter().map(|c| c.norm()).sum();
    s * s / psi.dim() as f64
}
