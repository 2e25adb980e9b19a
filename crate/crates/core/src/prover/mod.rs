//! Symbolic proof that no rank-1 matrix fits a coefficient pattern.
//!
//! A pattern assigns one coefficient symbol to every cell of a
//! matricization. The engine case-splits each symbol class into zero or
//! nonzero, propagates the 2×2 minor equations a rank-1 matrix must satisfy,
//! and closes a branch when the surviving assignment would make the overlap
//! with the all-ones stopper nonzero.

mod engine;
mod pattern;
mod symbolic;
mod trace;

pub use engine::{prove_no_rank1, ProofOutcome, ProofReport, DEFAULT_MAX_BRANCHES};
pub use pattern::{derive_pattern, instantiate, PatternMatrix, ZERO_SYMBOL};
pub use symbolic::{check_unextendibility_symbolic, symbolic_basis, CutProof};
pub use trace::{replay_trace, CellRef, CloseReason, MinorRef, Status, TraceEvent};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProverError {
    #[error("cell {index:?} is covered by both {first} and {second}")]
    AmbiguousCell { index: [usize; 4], first: String, second: String },
    #[error("state {label} has amplitude {re}{im:+}i at {index:?}; only 0/1 amplitudes form a pattern")]
    NonUnitAmplitude { label: String, index: [usize; 4], re: f64, im: f64 },
    #[error("{states} states but {symbols} symbols")]
    SymbolCountMismatch { states: usize, symbols: usize },
    #[error("branch budget of {0} exhausted")]
    BranchBudgetExceeded(usize),
    #[error("{0}")]
    Family(#[from] crate::family::FamilyError),
    #[error("{0}")]
    Tensor(#[from] crate::tensor::TensorError),
}
