//! Verification suites over the constructed families. Each suite returns a
//! [`CheckResult`] with a status, metrics and, on failure, a witness.

mod distill;
mod ges;
mod nonlocal;
mod result;
mod structure;
mod unext;

pub use distill::{
    phi1_vectors, psi_plus_seven_basis, verify_distillability, verify_distillability_on, DistillSubspace,
};
pub use ges::{complement_kets, verify_ges};
pub use nonlocal::{verify_strong_nonlocality, verify_strong_nonlocality_on};
pub use result::{CheckResult, Metric, Status, Witness};
pub use structure::{
    biseparability_witness, verify_biseparability, verify_counts, verify_orthogonality,
};
pub use unext::{numeric_unextendibility, verify_unextendibility, UnextMode};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::family::FamilyError;
use crate::linalg::LinalgError;
use crate::prover::ProverError;
use crate::tensor::{Ket, TensorError};
use crate::C64;

pub const ANCHOR_ORTHOGONALITY: &str = "Theorems 1/4 (pairwise orthogonality)";
pub const ANCHOR_BISEPARABILITY: &str = "Theorems 1/4 (biseparable members)";
pub const ANCHOR_COUNTS: &str = "Theorems 1/4 (dimension counts)";
pub const ANCHOR_GES: &str = "Theorems 1/4 (genuinely entangled complement basis)";
pub const ANCHOR_UNEXTENDIBILITY: &str = "Theorems 1/4 (unextendibility)";
pub const ANCHOR_NONLOCALITY: &str = "Theorem 2 (strong nonlocality)";
pub const ANCHOR_DISTILLABILITY: &str = "Theorems 3/5 (distillability)";

/// Smallest local dimension for which runs without `long_running` are allowed
/// to skip the nonlocality nullspace.
pub const LONG_RUNNING_FROM: usize = 5;

#[derive(Debug, Error)]
pub enum CertifierError {
    #[error("d = {0} requires the long-running flag for this suite")]
    LongRunningRequired(usize),
    #[error("family is empty")]
    EmptyFamily,
    #[error("party {0} out of range (1..=4)")]
    InvalidParty(usize),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Prover(#[from] ProverError),
}

/// Tolerances and knobs shared by the suites.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertifierConfig {
    /// Relative overlap bound for distinct members.
    pub tol_orth: f64,
    /// Relative singular value cut for numeric ranks.
    pub tol_rank: f64,
    /// `σ₂/σ₁` at or below this counts as product across a cut.
    pub tol_product: f64,
    /// `σ₂/σ₁` above this counts as entangled across a cut.
    pub tol_entangled: f64,
    /// Optimizer floor: numeric unextendibility evidence needs `min σ₂` above this.
    pub numeric_floor: f64,
    pub random_trials: usize,
    pub subprojectors: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for CertifierConfig {
    fn default() -> Self {
        Self {
            tol_orth: 1e-12,
            tol_rank: 1e-9,
            tol_product: 1e-10,
            tol_entangled: 1e-6,
            numeric_floor: 0.01,
            random_trials: 100,
            subprojectors: 20,
            restarts: 200,
            seed: 0,
        }
    }
}

/// Kets as normalized dense columns.
pub(crate) fn dense_columns(kets: &[Ket<f64>]) -> DMatrix<C64> {
    let cols: Vec<DVector<C64>> = kets
        .iter()
        .map(|k| {
            let v = k.to_dense();
            let n = v.norm();
            if n > 0.0 {
                v.unscale(n)
            } else {
                v
            }
        })
        .collect();
    DMatrix::from_columns(&cols)
}

/// `σ₂/σ₁` of a matricization, 0 for rank ≤ 1 shapes or the zero matrix.
pub(crate) fn sigma_ratio(values: &[f64]) -> f64 {
    match values {
        [s1, s2, ..] if *s1 > 0.0 => s2 / s1,
        _ => 0.0,
    }
}
