//! Coherence quantifiers for finite-dimensional density matrices.
//!
//! The crate computes, for a d-dimensional density matrix in a fixed
//! incoherent basis:
//!
//! - the **coherence fraction** `C_F`: the maximal overlap with any
//!   maximally coherent state, found by multi-start phase optimization;
//! - the **robustness of coherence** `C_R`, via a specialized log-barrier
//!   SDP solver that returns a dual certificate;
//! - the **l1-norm of coherence** and the max-relative-entropy monotone
//!   `mu_d`;
//! - Schur-channel (GIO) machinery: correlation matrices, dephasing,
//!   diagonal-unitary conjugation;
//! - a batch experiment runner for the `C_F` vs normalized-robustness gap
//!   study across dimensions, with reproducible seeded sampling and CSV
//!   output.

pub mod channels;
pub mod error;
pub mod experiments;
pub mod io;
pub mod linalg;
pub mod measures;
pub mod seeding;
pub mod states;

pub use channels::{CorrelationMatrix, PhaseVector};
pub use error::{CoherenceError, Result};
pub use measures::{CfConfig, CfReport, CrReport, NormalizedMeasures, SdpConfig};
pub use states::{DensityMatrix, McmsParams, PureState};
