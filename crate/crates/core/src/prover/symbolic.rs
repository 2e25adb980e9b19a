use rayon::prelude::*;

use super::{derive_pattern, prove_no_rank1, PatternMatrix, ProofReport, ProverError};
use crate::family::{build_psi, center_point_state, layer_count, Sign};
use crate::tensor::{Bipartition, Ket};

/// States whose span contains the complement (together with the stopper
/// direction): every ψ₊ of every layer plus the center state, with the
/// coefficient names used in the patterns (`a..h`, `k` for qutrits; `a1..h1,
/// a2..`, `p` otherwise).
pub fn symbolic_basis(d: usize) -> Result<(Vec<Ket<f64>>, Vec<String>), ProverError> {
    let names = ["a", "b", "c", "d", "e", "f", "g", "h"];
    let mut kets = Vec::new();
    let mut symbols = Vec::new();
    for l in 1..=layer_count(d) {
        for (i, n) in names.iter().enumerate() {
            kets.push(build_psi::<f64>(d, l, i + 1, Sign::Plus)?);
            symbols.push(if d == 3 { n.to_string() } else { format!("{n}{l}") });
        }
    }
    kets.push(center_point_state::<f64>(d)?);
    symbols.push(if d == 3 { "k".to_string() } else { "p".to_string() });
    Ok((kets, symbols))
}

#[derive(Clone, Debug)]
pub struct CutProof {
    pub bipartition: Bipartition,
    pub pattern: PatternMatrix,
    pub report: ProofReport,
}

/// Derives the coefficient pattern for each of the seven cuts and runs the
/// prover on it.
pub fn check_unextendibility_symbolic(d: usize, max_branches: usize) -> Result<Vec<CutProof>, ProverError> {
    let (kets, symbols) = symbolic_basis(d)?;
    Bipartition::all()
        .into_par_iter()
        .map(|bp| {
            let pattern = derive_pattern(&kets, &symbols, bp)?;
            let report = prove_no_rank1(&pattern, max_branches)?;
            Ok(CutProof { bipartition: bp, pattern, report })
        })
        .collect()
}
