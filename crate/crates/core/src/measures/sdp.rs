//! Robustness of coherence via a primal log-barrier interior-point method.
//!
//! The SDP is `1 + C_R(rho) = min { sum_i s_i | diag(s) >= rho }` with the
//! dual `max { tr(rho tau) | tau >= 0, Delta(tau) = I }`: the dual optimum
//! ranges over correlation matrices. Only the `d` diagonal entries of sigma
//! are unknowns, so a bespoke barrier method is far cheaper than a general
//! SDP solver and hands back a checkable dual certificate `tau = mu S^{-1}`
//! at the final barrier center (`S = diag(s) - rho`).

use nalgebra::{Cholesky, DMatrix, DVector};
use num_complex::Complex64;

use crate::channels::CorrelationMatrix;
use crate::error::{CoherenceError, Result};
use crate::linalg::{self, CMat};
use crate::states::DensityMatrix;

/// Settings for the log-barrier solver.
#[derive(Debug, Clone)]
pub struct SdpConfig {
    pub mu_initial: f64,
    pub mu_shrink: f64,
    /// Outer loop stops once `d * mu` drops below this.
    pub gap_tol: f64,
    /// Newton decrement threshold for a centered iterate.
    pub newton_tol: f64,
    pub max_newton_per_center: usize,
    pub max_total_iterations: usize,
    /// PSD tolerance applied when validating the dual certificate.
    pub dual_psd_tol: f64,
}

impl Default for SdpConfig {
    fn default() -> Self {
        Self {
            mu_initial: 1.0,
            mu_shrink: 0.2,
            gap_tol: 1e-9,
            newton_tol: 1e-10,
            max_newton_per_center: 60,
            max_total_iterations: 5000,
            dual_psd_tol: 1e-7,
        }
    }
}

/// Robustness value plus primal/dual optimality data.
#[derive(Debug, Clone)]
pub struct CrReport {
    /// `C_R(rho) = sum_i s_i - 1` (unnormalized).
    pub value: f64,
    /// `(1 + C_R)/d`, on the `[1/d, 1]` scale of `C_F`.
    pub normalized: f64,
    /// Diagonal of the primal optimum sigma.
    pub sigma_diag: Vec<f64>,
    /// Dual certificate: a feasible correlation matrix.
    pub tau: CorrelationMatrix,
    /// `tr(sigma) - tr(rho tau)`, the certified suboptimality.
    pub duality_gap: f64,
}

fn slack(rho: &CMat, s: &[f64]) -> CMat {
    let d = rho.nrows();
    CMat::from_fn(d, d, |i, j| {
        if i == j {
            Complex64::new(s[i], 0.0) - rho[(i, j)]
        } else {
            -rho[(i, j)]
        }
    })
}

/// Positive-definiteness probe via eigendecomposition. nalgebra's complex
/// Cholesky cannot be used here: complex square roots always exist, so it
/// does not reject indefinite Hermitian input.
struct PdSlack {
    logdet: f64,
    inverse: CMat,
}

fn analyze_slack(slack_mat: &CMat) -> Option<PdSlack> {
    let eig = linalg::eigh(slack_mat).ok()?;
    if eig.min_eigenvalue() <= 0.0 {
        return None;
    }
    let d = eig.dim();
    let logdet = eig.eigenvalues.iter().map(|l| l.ln()).sum();
    let v = &eig.eigenvectors;
    let inv_diag = CMat::from_fn(d, d, |i, j| {
        if i == j {
            Complex64::new(1.0 / eig.eigenvalues[i], 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    Some(PdSlack {
        logdet,
        inverse: v * inv_diag * v.adjoint(),
    })
}

fn barrier_value(s: &[f64], mu: f64, logdet: f64) -> f64 {
    s.iter().sum::<f64>() - mu * logdet
}

/// `mu S^{-1}` renormalized to an exact unit diagonal.
fn renormalized_tau(s_inv: &CMat, mu: f64) -> CMat {
    let d = s_inv.nrows();
    let tau_raw = s_inv * Complex64::new(mu, 0.0);
    let scale: Vec<f64> = (0..d).map(|i| tau_raw[(i, i)].re.sqrt()).collect();
    let mut tau = CMat::from_fn(d, d, |i, j| tau_raw[(i, j)] / (scale[i] * scale[j]));
    for i in 0..d {
        tau[(i, i)] = Complex64::new(1.0, 0.0);
    }
    tau
}

/// One well-centered point on the barrier path.
#[derive(Clone)]
struct CenteredStage {
    mu: f64,
    s: Vec<f64>,
    tau: CMat,
}

/// Computes `C_R(rho)` with a primal log-barrier path following scheme.
///
/// The barrier parameter follows the fixed shrink schedule while Newton
/// centering still converges. Below a state-dependent mu (around 1e-6 for
/// states whose optimal slack has a degenerate null space) the Newton system
/// is too ill-conditioned for f64 and centering stalls; the path is then cut
/// off there and the answer is taken from a linear (Richardson) extrapolation
/// of the last two centered stages to mu = 0, which cancels the O(mu) term
/// of the central path and certifies gaps around 1e-10 even on such states.
pub fn robustness(rho: &DensityMatrix, config: &SdpConfig) -> Result<CrReport> {
    let d = rho.dim();
    let m = rho.matrix();

    // strictly feasible start: diag(s) - rho has min eigenvalue >= 1
    let lambda_max = rho.max_eigenvalue()?;
    let mut s = vec![lambda_max + 1.0; d];
    let mut mu = config.mu_initial;
    let mut total_iterations = 0usize;
    let mut stages: Vec<CenteredStage> = Vec::new();

    'path: loop {
        // Newton-center the barrier sum(s) - mu log det(diag(s) - rho)
        let mut centered_inverse: Option<CMat> = None;
        for _ in 0..config.max_newton_per_center {
            total_iterations += 1;
            if total_iterations > config.max_total_iterations {
                break 'path;
            }
            let slack_mat = slack(m, &s);
            let analyzed = match analyze_slack(&slack_mat) {
                Some(a) => a,
                None => break,
            };
            let s_inv = &analyzed.inverse;

            let grad = DVector::from_fn(d, |i, _| 1.0 - mu * s_inv[(i, i)].re);
            let hess = DMatrix::from_fn(d, d, |i, j| mu * s_inv[(i, j)].norm_sqr());
            let hess_chol = match Cholesky::new(hess) {
                Some(c) => c,
                None => break,
            };
            let delta = hess_chol.solve(&(-&grad));
            let decrement = -grad.dot(&delta);
            if decrement <= config.newton_tol {
                centered_inverse = Some(analyzed.inverse);
                break;
            }

            // damped step: stay inside the cone and decrease the barrier
            let phi = barrier_value(&s, mu, analyzed.logdet);
            let directional = grad.dot(&delta); // negative
            let mut step = 1.0;
            let mut accepted = false;
            loop {
                let trial: Vec<f64> =
                    s.iter().zip(delta.iter()).map(|(x, d)| x + step * d).collect();
                if let Some(trial_analyzed) = analyze_slack(&slack(m, &trial)) {
                    let trial_phi = barrier_value(&trial, mu, trial_analyzed.logdet);
                    if trial_phi <= phi + 1e-4 * step * directional {
                        s = trial;
                        accepted = true;
                        break;
                    }
                }
                step *= 0.5;
                if step < 1e-14 {
                    break;
                }
            }
            if !accepted {
                break;
            }
        }

        // a small Newton decrement is necessary but, at tiny mu, no longer
        // sufficient for centering (the gradient itself is cancellation
        // noise); the reliable signature of a centered point is that its
        // certificate gap equals d*mu
        let stage = centered_inverse.and_then(|inv| {
            let tau = renormalized_tau(&inv, mu);
            let dual = linalg::schur_product(m, &tau.transpose())
                .ok()?
                .iter()
                .sum::<Complex64>()
                .re;
            let gap = s.iter().sum::<f64>() - dual;
            let path_gap = d as f64 * mu;
            (gap >= -1e-11 && gap <= 2.0 * path_gap + 1e-11).then_some(CenteredStage {
                mu,
                s: s.clone(),
                tau,
            })
        });
        match stage {
            Some(stage) => {
                stages.push(stage);
                if stages.len() > 2 {
                    stages.remove(0);
                }
            }
            // f64 floor for this state: stop the path here
            None => break,
        }
        if (d as f64) * mu <= config.gap_tol {
            break;
        }
        mu *= config.mu_shrink;
    }

    // candidates: the last centered stage, and (better, when available) the
    // mu -> 0 extrapolation through the last two stages
    let mut candidates: Vec<(Vec<f64>, CMat)> = Vec::new();
    if let Some(last) = stages.last() {
        candidates.push((last.s.clone(), last.tau.clone()));
    }
    if let [prev, last] = &stages[..] {
        let w = last.mu / (prev.mu - last.mu);
        let mut s_ext: Vec<f64> = last
            .s
            .iter()
            .zip(&prev.s)
            .map(|(a, b)| a + (a - b) * w)
            .collect();
        let mut tau_ext = CMat::from_fn(d, d, |i, j| {
            last.tau[(i, j)] + (last.tau[(i, j)] - prev.tau[(i, j)]) * w
        });
        for i in 0..d {
            tau_ext[(i, i)] = Complex64::new(1.0, 0.0);
        }
        // extrapolation noise can push tau or the slack slightly outside
        // their cones; clip tau's negative eigenvalues and lift s to restore
        // exact feasibility (both repairs cost O(noise) in the gap)
        if let Ok(eig) = linalg::eigh(&tau_ext) {
            if eig.min_eigenvalue() < 0.0 {
                let clipped = CMat::from_fn(d, d, |i, j| {
                    if i == j {
                        Complex64::new(eig.eigenvalues[i].max(0.0), 0.0)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                });
                tau_ext = &eig.eigenvectors * clipped * eig.eigenvectors.adjoint();
                let scale: Vec<f64> = (0..d).map(|i| tau_ext[(i, i)].re.sqrt()).collect();
                if scale.iter().all(|x| x.is_finite() && *x > 0.0) {
                    tau_ext = CMat::from_fn(d, d, |i, j| tau_ext[(i, j)] / (scale[i] * scale[j]));
                    for i in 0..d {
                        tau_ext[(i, i)] = Complex64::new(1.0, 0.0);
                    }
                }
            }
        }
        if let Ok(eig) = linalg::eigh(&slack(m, &s_ext)) {
            let min_eig = eig.min_eigenvalue();
            if min_eig < 0.0 {
                for v in &mut s_ext {
                    *v += -min_eig * 1.000001;
                }
            }
        }
        candidates.push((s_ext, tau_ext));
    }

    let nonconvergence = |gap: f64| CoherenceError::SolverNonConvergence {
        iterations: total_iterations,
        gap,
        best_value: s.iter().sum::<f64>() - 1.0,
    };

    let mut best: Option<(f64, f64, Vec<f64>, CorrelationMatrix)> = None;
    for (s_c, tau_c) in candidates {
        let tau = match CorrelationMatrix::with_psd_tol(tau_c, config.dual_psd_tol) {
            Ok(t) => t,
            Err(_) => continue,
        };
        // tr(rho tau) = sum_ij rho_ij tau_ji
        let dual = linalg::schur_product(m, &tau.matrix().transpose())?
            .iter()
            .sum::<Complex64>()
            .re;
        let gap = s_c.iter().sum::<f64>() - dual;
        if best.as_ref().is_none_or(|b| gap.abs() < b.0.abs()) {
            best = Some((gap, dual, s_c, tau));
        }
    }

    let (gap, _, s_best, tau) = best.ok_or_else(|| nonconvergence(f64::INFINITY))?;
    if gap.abs() > 1e-4 {
        return Err(nonconvergence(gap));
    }

    let primal: f64 = s_best.iter().sum();
    Ok(CrReport {
        value: primal - 1.0,
        normalized: primal / d as f64,
        sigma_diag: s_best,
        tau,
        duality_gap: gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{self, McmsParams};
    use num_complex::Complex64;

    #[test]
    fn diagonal_state_has_zero_robustness() {
        let rho = states::mcms_state(McmsParams::new(4, 0.0).unwrap()).unwrap();
        let report = robustness(&rho, &SdpConfig::default()).unwrap();
        assert!(report.value.abs() < 1e-7, "value={}", report.value);
        assert!(report.duality_gap.abs() < 1e-6);
    }

    #[test]
    fn qubit_robustness_is_twice_abs_r() {
        let r = Complex64::from_polar(0.3, 0.7);
        let m = crate::linalg::CMat::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => Complex64::new(0.55, 0.0),
            (1, 1) => Complex64::new(0.45, 0.0),
            (0, 1) => r,
            _ => r.conj(),
        });
        let rho = DensityMatrix::new(m).unwrap();
        let report = robustness(&rho, &SdpConfig::default()).unwrap();
        assert!((report.value - 0.6).abs() < 1e-7, "value={}", report.value);
    }

    #[test]
    fn maximally_coherent_robustness_is_d_minus_one() {
        for d in 2..=5 {
            let phi = states::maximally_coherent(d, None).unwrap();
            let rho = states::pure_to_density(&phi).unwrap();
            let report = robustness(&rho, &SdpConfig::default()).unwrap();
            assert!(
                (report.value - (d as f64 - 1.0)).abs() < 1e-6,
                "d={d} value={}",
                report.value
            );
        }
    }

    #[test]
    fn mcms_robustness_closed_form() {
        // C_R(rho_m) = p (d-1)
        let rho = states::mcms_state(McmsParams::new(4, 0.5).unwrap()).unwrap();
        let report = robustness(&rho, &SdpConfig::default()).unwrap();
        assert!((report.value - 1.5).abs() < 1e-7);
    }

    #[test]
    fn certificate_is_feasible_and_tight() {
        for seed in 0..10 {
            let rho = states::random_density(4, seed).unwrap();
            let report = robustness(&rho, &SdpConfig::default()).unwrap();
            assert!(report.duality_gap >= -1e-9, "gap={}", report.duality_gap);
            assert!(report.duality_gap <= 1e-6, "gap={}", report.duality_gap);
            // primal feasibility: diag(s) - rho PSD (up to extrapolation noise)
            let slack_mat = super::slack(rho.matrix(), &report.sigma_diag);
            let min_eig = crate::linalg::eigh(&slack_mat).unwrap().min_eigenvalue();
            assert!(min_eig >= -1e-9, "min slack eig {min_eig}");
        }
    }
}
