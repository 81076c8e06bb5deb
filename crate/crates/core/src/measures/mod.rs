//! Coherence quantifiers: `C_l1`, the coherence fraction `C_F`, the
//! robustness `C_R`, the max-relative-entropy monotone `mu_d`, and closed
//! forms for special families.

mod cf;
mod sdp;

pub use cf::{cf_gradient, cf_objective, cf_pure_closed_form, coherence_fraction, CfConfig, CfReport};
pub use sdp::{robustness, CrReport, SdpConfig};

use crate::error::{CoherenceError, Result};
use crate::linalg::{self, CMat};
use crate::states::DensityMatrix;
use num_complex::Complex64;

/// `C_l1(rho) = sum_{i != j} |rho_ij|`.
pub fn c_l1(rho: &DensityMatrix) -> f64 {
    let d = rho.dim();
    let mut s = 0.0;
    for i in 0..d {
        for j in 0..d {
            if i != j {
                s += rho.entry(i, j).norm();
            }
        }
    }
    s
}

/// Max-relative entropy to the dephased state:
/// `mu_d(rho) = log2 || Delta(rho)^{-1/2} rho Delta(rho)^{-1/2} ||_inf`.
///
/// Diagonal entries below 1e-14 are allowed only when the whole row/column
/// vanishes, in which case the computation restricts to the support.
pub fn mu_d(rho: &DensityMatrix) -> Result<f64> {
    let d = rho.dim();
    let diag = rho.diagonal();
    let mut support: Vec<usize> = Vec::with_capacity(d);
    for i in 0..d {
        if diag[i] > 1e-14 {
            support.push(i);
        } else {
            // zero diagonal forces a zero row for PSD matrices, but check
            let row_mass: f64 = (0..d)
                .filter(|&j| j != i)
                .map(|j| rho.entry(i, j).norm())
                .sum();
            if row_mass > 1e-12 {
                return Err(CoherenceError::SingularDiagonal { index: i });
            }
        }
    }
    let k = support.len();
    let conj = CMat::from_fn(k, k, |a, b| {
        let (i, j) = (support[a], support[b]);
        rho.entry(i, j) / Complex64::new((diag[i] * diag[j]).sqrt(), 0.0)
    });
    let norm = linalg::spectral_norm_hermitian(&conj)?;
    Ok(norm.log2().max(0.0))
}

/// Coherence number of the MCMS family member `rho_m(d, p)`: the unique
/// `k` with `(k-2)/(d-1) < p <= (k-1)/(d-1)`.
pub fn mcms_coherence_number(d: usize, p: f64) -> Result<usize> {
    if d == 0 {
        return Err(CoherenceError::InvalidParameter("dim must be >= 1".into()));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(CoherenceError::InvalidParameter(format!(
            "p must lie in [0,1], got {p}"
        )));
    }
    let x = p * (d as f64 - 1.0);
    // guard against p exactly on a boundary being pushed over by rounding
    let ceil = if (x - x.round()).abs() < 1e-12 {
        x.round()
    } else {
        x.ceil()
    };
    Ok(((ceil as usize) + 1).clamp(1, d))
}

/// The three quantifiers on the common `[1/d, 1]` scale.
#[derive(Debug, Clone, Copy)]
pub struct NormalizedMeasures {
    /// `(1 + C_l1)/d`
    pub cl1_bar: f64,
    /// `(1 + C_R)/d`
    pub cr_bar: f64,
    /// `C_F`
    pub cf: f64,
}

/// Computes `(C_l1_bar, C_R_bar, C_F)`; the ordering
/// `C_F <= C_R_bar <= C_l1_bar` holds up to solver tolerance.
pub fn normalized_measures(
    rho: &DensityMatrix,
    cf_config: &CfConfig,
    sdp_config: &SdpConfig,
) -> Result<NormalizedMeasures> {
    let d = rho.dim() as f64;
    let cl1_bar = (1.0 + c_l1(rho)) / d;
    let cr_bar = robustness(rho, sdp_config)?.normalized;
    let cf = coherence_fraction(rho, cf_config)?.value;
    Ok(NormalizedMeasures {
        cl1_bar,
        cr_bar,
        cf,
    })
}

/// Relative gap `g(rho) = (C_R_bar - C_F)/C_R_bar`, the figure of merit of
/// the dimension-scan experiment. Negative values beyond ~1e-6 indicate an
/// optimizer or solver fault.
pub fn relative_gap(
    rho: &DensityMatrix,
    cf_config: &CfConfig,
    sdp_config: &SdpConfig,
) -> Result<f64> {
    let m = normalized_measures(rho, cf_config, sdp_config)?;
    Ok((m.cr_bar - m.cf) / m.cr_bar)
}
