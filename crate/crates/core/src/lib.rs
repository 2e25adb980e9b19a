//! Construction and certification of four-party qudit unextendible
//! biseparable bases and the genuinely entangled subspaces they leave.
//!
//! The numeric core is generic over the real scalar (`f32` or `f64`);
//! the certification layer runs in `f64`. Aliases for the common
//! instantiations live at the crate root.

pub mod certifier;
pub mod family;
pub mod family_file;
pub mod linalg;
pub mod prover;
pub mod report;
pub mod rng;
pub mod scalar;
pub mod tensor;

pub use scalar::{Real, C};

pub type C64 = C<f64>;
pub type Ket64 = tensor::Ket<f64>;
pub type Ket32 = tensor::Ket<f32>;
pub type DensityMatrix64 = tensor::DensityMatrix<f64>;
pub type StateFamily64 = family::StateFamily<f64>;
