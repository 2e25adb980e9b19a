//! Sparse four-party states over (C^d)⊗4 and the reshaping operations
//! that turn them into matrices.
//!
//! Index order is lexicographic everywhere: for a group of parties taken
//! in increasing party order, the first party is the most significant
//! digit. This fixes matricizations bit-for-bit across runs.

mod bipartition;
mod density;
mod ket;
mod reshape;

pub use bipartition::{Bipartition, PartySet};
pub use density::{partial_trace, DensityMatrix};
pub use ket::{inner, tensor4, Index4, Ket, STORAGE_EPS};
pub(crate) use reshape::group_index;
pub use reshape::{is_product_across, matricize, matricize_parties, schmidt_values, PRODUCT_TOL};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TensorError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("local dimension {0} not supported (need d >= 3)")]
    InvalidDimension(usize),
    #[error("index {index:?} out of range for d = {d}")]
    IndexOutOfRange { index: Index4, d: usize },
    #[error("state is zero")]
    ZeroState,
    #[error("input states are not orthonormal (deviation {deviation:e})")]
    NonOrthonormalInput { deviation: f64 },
    #[error("invalid party group: {0}")]
    InvalidParties(String),
    #[error(transparent)]
    Linalg(#[from] crate::linalg::LinalgError),
}
