//! Shared oracle helpers for integration tests. Everything here is
//! deliberately independent of the optimizer/solver implementation paths it
//! is used to check.

use cohfrac_core::states::DensityMatrix;
use rayon::prelude::*;

/// Brute-force C_F for qutrits: dense grid over the two free phases.
///
/// Evaluates the overlap objective directly from the matrix entries,
/// `f = Re(rho_01 e^{i t1}) + Re(rho_02 e^{i t2}) + Re(rho_12 e^{i(t2-t1)})`,
/// and returns `(1 + 2 max f)/3`.
pub fn grid_cf_qutrit(rho: &DensityMatrix, grid_points: usize) -> f64 {
    assert_eq!(rho.dim(), 3);
    let z01 = rho.entry(0, 1);
    let z02 = rho.entry(0, 2);
    let z12 = rho.entry(1, 2);
    let (r01, p01) = (z01.norm(), z01.arg());
    let (r02, p02) = (z02.norm(), z02.arg());
    let (r12, p12) = (z12.norm(), z12.arg());

    let step = 2.0 * std::f64::consts::PI / grid_points as f64;
    let best = (0..grid_points)
        .into_par_iter()
        .map(|a| {
            let t1 = a as f64 * step;
            let c1 = r01 * (p01 + t1).cos();
            let mut local = f64::NEG_INFINITY;
            for b in 0..grid_points {
                let t2 = b as f64 * step;
                let f = c1 + r02 * (p02 + t2).cos() + r12 * (p12 + t2 - t1).cos();
                if f > local {
                    local = f;
                }
            }
            local
        })
        .reduce(|| f64::NEG_INFINITY, f64::max);
    (1.0 + 2.0 * best) / 3.0
}
