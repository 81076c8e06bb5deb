//! JSON file formats for states and correlation matrices.
//!
//! Density matrices (and correlation matrices) are stored as
//! `{ "dim": d, "re": [...], "im": [...] }` with row-major flat arrays;
//! pure states as `{ "dim": d, "amp_re": [...], "amp_im": [...] }`.
//! serde_json prints f64 with shortest round-trip representation, so files
//! survive a write/read cycle bit-exactly.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channels::CorrelationMatrix;
use crate::error::{CoherenceError, Result};
use crate::linalg::{CMat, CVec};
use crate::states::{DensityMatrix, PureState};

#[derive(Debug, Serialize, Deserialize)]
pub struct MatrixFile {
    pub dim: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PureStateFile {
    pub dim: usize,
    pub amp_re: Vec<f64>,
    pub amp_im: Vec<f64>,
}

/// Either on-disk state representation.
#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateFile {
    Density(MatrixFile),
    Pure(PureStateFile),
}

impl MatrixFile {
    pub fn from_matrix(m: &CMat) -> Self {
        let d = m.nrows();
        let mut re = Vec::with_capacity(d * d);
        let mut im = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                re.push(m[(i, j)].re);
                im.push(m[(i, j)].im);
            }
        }
        Self { dim: d, re, im }
    }

    pub fn to_matrix(&self) -> Result<CMat> {
        let d = self.dim;
        if self.re.len() != d * d || self.im.len() != d * d {
            return Err(CoherenceError::InvalidParameter(format!(
                "matrix file: expected {} entries, got re={} im={}",
                d * d,
                self.re.len(),
                self.im.len()
            )));
        }
        Ok(CMat::from_fn(d, d, |i, j| {
            Complex64::new(self.re[i * d + j], self.im[i * d + j])
        }))
    }
}

impl PureStateFile {
    pub fn from_state(psi: &PureState) -> Self {
        Self {
            dim: psi.dim(),
            amp_re: psi.amplitudes().iter().map(|c| c.re).collect(),
            amp_im: psi.amplitudes().iter().map(|c| c.im).collect(),
        }
    }

    pub fn to_state(&self) -> Result<PureState> {
        if self.amp_re.len() != self.dim || self.amp_im.len() != self.dim {
            return Err(CoherenceError::InvalidParameter(
                "pure state file: amplitude length mismatch".into(),
            ));
        }
        PureState::new(CVec::from_fn(self.dim, |i, _| {
            Complex64::new(self.amp_re[i], self.amp_im[i])
        }))
    }
}

pub fn write_density(path: &Path, rho: &DensityMatrix) -> Result<()> {
    let file = MatrixFile::from_matrix(rho.matrix());
    fs::write(path, serde_json::to_string_pretty(&file)?)?;
    Ok(())
}

pub fn write_pure(path: &Path, psi: &PureState) -> Result<()> {
    let file = PureStateFile::from_state(psi);
    fs::write(path, serde_json::to_string_pretty(&file)?)?;
    Ok(())
}

pub fn write_correlation(path: &Path, tau: &CorrelationMatrix) -> Result<()> {
    let file = MatrixFile::from_matrix(tau.matrix());
    fs::write(path, serde_json::to_string_pretty(&file)?)?;
    Ok(())
}

/// Reads a state file of either kind, converting pure states to density
/// matrices.
pub fn read_density(path: &Path) -> Result<DensityMatrix> {
    let text = fs::read_to_string(path)?;
    let parsed: StateFile = serde_json::from_str(&text)?;
    match parsed {
        StateFile::Density(f) => DensityMatrix::new(f.to_matrix()?),
        StateFile::Pure(f) => crate::states::pure_to_density(&f.to_state()?),
    }
}

pub fn read_pure(path: &Path) -> Result<PureState> {
    let text = fs::read_to_string(path)?;
    let parsed: PureStateFile = serde_json::from_str(&text)?;
    parsed.to_state()
}
