//! Dense complex kernels on top of nalgebra.

mod hermitian;
mod optimize;
mod svd;

pub use hermitian::{
    constraint_residual, hermitian_constraint_nullspace, identity_overlap, Accumulation, HermitianCoordinates,
    HermitianNullspace, NULL_EIG_REL,
};
pub use optimize::{min_second_singular, min_second_singular_with, second_singular, MinSigma2, OptimizerSettings};
pub use svd::{
    complement_basis, nullspace, numeric_rank, orthonormalize_columns, projector_distance, rank_of_values,
    singular_values, ABS_RANK_FLOOR, DEFAULT_RANK_TOL,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("SVD failed to converge")]
    NoConvergence,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("no states to build constraints from")]
    EmptyConstraintSet,
    #[error("invalid constraint pair ({0}, {1})")]
    InvalidPair(usize, usize),
    #[error("subspace is empty")]
    EmptySubspace,
    #[error("restarts must be at least 1")]
    NoRestarts,
}
