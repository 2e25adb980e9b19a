use std::time::Instant;

use super::{CertifierError, CheckResult, Status, Witness, ANCHOR_NONLOCALITY, LONG_RUNNING_FROM};
use crate::family::{build_ubb, StateFamily};
use crate::linalg::{constraint_residual, hermitian_constraint_nullspace, identity_overlap, Accumulation};
use crate::tensor::{Bipartition, PartySet};

/// Required overlap of the single solution with the normalized identity.
const IDENTITY_TOL: f64 = 1e-8;

/// For each party `i` in `parties`, the Hermitian operators `H` on the other
/// three parties with `⟨ψ_a|(I_i ⊗ H)|ψ_b⟩ = 0` for all distinct members must
/// be multiples of the identity.
///
/// Refuses `d ≥ 5` unless `long_running` is set (the Gram matrix has
/// `d¹²` entries).
pub fn verify_strong_nonlocality(
    d: usize,
    parties: &[usize],
    long_running: bool,
) -> Result<CheckResult, CertifierError> {
    if d >= LONG_RUNNING_FROM && !long_running {
        return Err(CertifierError::LongRunningRequired(d));
    }
    verify_strong_nonlocality_on(&build_ubb::<f64>(d)?, parties, Accumulation::default())
}

/// [`verify_strong_nonlocality`] over an arbitrary family.
pub fn verify_strong_nonlocality_on(
    family: &StateFamily<f64>,
    parties: &[usize],
    mode: Accumulation,
) -> Result<CheckResult, CertifierError> {
    let start = Instant::now();
    if family.is_empty() {
        return Err(CertifierError::EmptyFamily);
    }
    let d = family.d();
    let kets = family.kets();
    let n = kets.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    let mut r = CheckResult::new("nonlocality", ANCHOR_NONLOCALITY);
    r.metric("members", n).metric("pairs", pairs.len());
    let mut trivial = 0usize;
    for &i in parties {
        let single = PartySet::single(i).map_err(|_| CertifierError::InvalidParty(i))?;
        let measured = single.complement();
        let dim = measured.dim(d);
        let ns = hermitian_constraint_nullspace(dim, &kets, &pairs, measured, mode)?;
        let k = ns.dimension();
        r.metric(format!("party{i}_operator_dim"), dim)
            .metric(format!("party{i}_nullspace_dim"), k)
            .metric(format!("party{i}_constraint_rows"), ns.constraint_rows)
            .metric(format!("party{i}_threshold_rel"), ns.threshold_rel);
        if let Some(gap) = ns.smallest_eigenvalues_rel.get(k) {
            r.metric(format!("party{i}_first_nonnull_eig_rel"), *gap);
        }
        let ok = match ns.basis.as_slice() {
            [h] => {
                let overlap = identity_overlap(h);
                let residual = constraint_residual(&kets, &pairs, measured, h)?;
                r.metric(format!("party{i}_identity_overlap"), overlap)
                    .metric(format!("party{i}_residual"), residual);
                (overlap - 1.0).abs() <= IDENTITY_TOL
            }
            _ => false,
        };
        if ok {
            trivial += 1;
        } else {
            r.degrade(Status::Fail);
            let cut = Bipartition::new(single).expect("single party");
            r.witness.get_or_insert(Witness::Bipartition { bipartition: cut.to_string() });
            r.note(format!("party {i}: solution space has dimension {k}"));
        }
    }
    r.metric("parties_checked", parties.len()).metric("parties_trivial", trivial);
    Ok(r.finish(start))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gate_for_large_d() {
        assert!(matches!(verify_strong_nonlocality(5, &[1], false), Err(CertifierError::LongRunningRequired(5))));
    }

    #[test]
    fn qutrit_party_one() {
        let r = verify_strong_nonlocality(3, &[1], false).unwrap();
        assert_eq!(r.status, Status::Pass);
        assert_eq!(r.get_i64("party1_nullspace_dim"), Some(1));
        assert!(r.get_f64("party1_residual").unwrap() < 1e-10);
    }
}
