use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;

use super::{
    dense_columns, sigma_ratio, CertifierConfig, CertifierError, CheckResult, Status, Witness, ANCHOR_BISEPARABILITY,
    ANCHOR_COUNTS, ANCHOR_ORTHOGONALITY,
};
use super::distill::psi_plus_seven_basis;
use crate::family::{build_ges_basis, build_ubb, layer_count, Role, StateFamily};
use crate::linalg::numeric_rank;
use crate::tensor::{schmidt_values, Bipartition, Ket};

/// All distinct pairs must satisfy `|⟨u|v⟩| ≤ tol·‖u‖‖v‖`.
pub fn verify_orthogonality(family: &StateFamily<f64>, tol: f64) -> Result<CheckResult, CertifierError> {
    let start = Instant::now();
    if family.is_empty() {
        return Err(CertifierError::EmptyFamily);
    }
    let a = dense_columns(&family.kets());
    let gram = a.adjoint() * &a;
    let n = family.len();
    let mut worst = (0.0f64, 0usize, 0usize);
    for j in 0..n {
        for i in 0..j {
            let v = gram[(i, j)].norm();
            if v > worst.0 {
                worst = (v, i, j);
            }
        }
    }
    let mut r = CheckResult::new("orthogonality", ANCHOR_ORTHOGONALITY);
    let labels = family.labels();
    r.metric("members", n).metric("pairs", n * (n - 1) / 2).metric("worst_overlap", worst.0);
    if n > 1 {
        r.metric("worst_pair", format!("{} ~ {}", labels[worst.1], labels[worst.2]));
    }
    if worst.0 > tol {
        r.degrade(Status::Fail);
        r.witness = Some(Witness::Pair { first: labels[worst.1].to_string(), second: labels[worst.2].to_string() });
    }
    Ok(r.finish(start))
}

/// First cut (in [`Bipartition::all`] order) across which `k` is product
/// within `tol`, with its `σ₂/σ₁`; `None` if there is none.
pub fn biseparability_witness(k: &Ket<f64>, tol: f64) -> Result<Option<(Bipartition, f64)>, CertifierError> {
    for bp in Bipartition::all() {
        let ratio = sigma_ratio(&schmidt_values(k, bp)?);
        if ratio <= tol {
            return Ok(Some((bp, ratio)));
        }
    }
    Ok(None)
}

fn best_cut(k: &Ket<f64>) -> Result<(Bipartition, f64), CertifierError> {
    let mut best = (Bipartition::all()[0], f64::INFINITY);
    for bp in Bipartition::all() {
        let ratio = sigma_ratio(&schmidt_values(k, bp)?);
        if ratio < best.1 {
            best = (bp, ratio);
        }
    }
    Ok(best)
}

/// Every member in the basis itself (including stopper and center states)
/// must be product across some cut.
pub fn verify_biseparability(family: &StateFamily<f64>, tol: f64) -> Result<CheckResult, CertifierError> {
    let start = Instant::now();
    let members: Vec<_> = family.members().iter().filter(|m| m.role.in_ubb()).collect();
    if members.is_empty() {
        return Err(CertifierError::EmptyFamily);
    }
    let found: Vec<(Bipartition, f64)> =
        members.par_iter().map(|m| best_cut(&m.ket)).collect::<Result<_, _>>()?;
    let mut r = CheckResult::new("biseparability", ANCHOR_BISEPARABILITY);
    let mut per_cut: BTreeMap<String, usize> = BTreeMap::new();
    let mut worst: Option<usize> = None;
    for (i, m) in members.iter().enumerate() {
        let cut = match biseparability_witness(&m.ket, tol)? {
            Some((bp, _)) => bp,
            None => {
                if worst.is_none_or(|w| found[i].1 > found[w].1) {
                    worst = Some(i);
                }
                continue;
            }
        };
        *per_cut.entry(cut.to_string()).or_default() += 1;
    }
    let max_ratio = found.iter().map(|f| f.1).fold(0.0, f64::max);
    r.metric("checked", members.len()).metric("max_best_ratio", max_ratio);
    for (cut, count) in per_cut {
        r.metric(format!("witness_cut_{cut}"), count);
    }
    if let Some(w) = worst {
        r.degrade(Status::Fail);
        r.witness = Some(Witness::Member { label: members[w].label.clone(), bipartition: found[w].0.to_string() });
        r.note(format!("{} is entangled across every cut (best σ₂/σ₁ = {:e})", members[w].label, found[w].1));
    }
    Ok(r.finish(start))
}

/// Sizes of the basis, its complement and the reduced ψ₊ subspace, and
/// linear independence of the basis vectors.
pub fn verify_counts(d: usize, cfg: &CertifierConfig) -> Result<CheckResult, CertifierError> {
    let start = Instant::now();
    let big_l = layer_count(d);
    let ubb = build_ubb::<f64>(d)?;
    let ges = build_ges_basis::<f64>(d)?;
    let n_ubb = ubb.len();
    let n_ges = ges.with_role(Role::GesBasis).count();
    let n_seven = psi_plus_seven_basis(d, cfg.tol_rank)?.len();
    let rank = numeric_rank(&dense_columns(&ubb.kets()), cfg.tol_rank)?;

    let expect_ubb = d.pow(4) - 8 * big_l;
    let expect_ges = 8 * big_l;
    let expect_seven = 7 * big_l - 1;
    let mut r = CheckResult::new("counts", ANCHOR_COUNTS);
    r.metric("ubb_members", n_ubb)
        .metric("ubb_expected", expect_ubb)
        .metric("ubb_rank", rank)
        .metric("ges_basis", n_ges)
        .metric("ges_expected", expect_ges)
        .metric("psi_plus_seven_dim", n_seven)
        .metric("psi_plus_seven_expected", expect_seven);
    let mut bad = Vec::new();
    if n_ubb != expect_ubb {
        bad.push(format!("basis has {n_ubb} members, expected {expect_ubb}"));
    }
    if rank != n_ubb {
        bad.push(format!("stacked basis rank {rank} < {n_ubb}"));
    }
    if n_ges != expect_ges {
        bad.push(format!("complement basis has {n_ges} states, expected {expect_ges}"));
    }
    if n_seven != expect_seven {
        bad.push(format!("reduced ψ₊ subspace has dimension {n_seven}, expected {expect_seven}"));
    }
    if !bad.is_empty() {
        r.degrade(Status::Fail);
        r.witness = Some(Witness::Labels { labels: bad.clone() });
        for b in bad {
            r.note(b);
        }
    }
    Ok(r.finish(start))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::build_ges_basis;

    #[test]
    fn qutrit_basis_is_orthogonal() {
        let fam = build_ubb::<f64>(3).unwrap();
        let r = verify_orthogonality(&fam, 1e-12).unwrap();
        assert_eq!(r.status, Status::Pass);
        assert!(r.get_f64("worst_overlap").unwrap() <= 1e-12);
    }

    #[test]
    fn duplicate_member_is_caught() {
        let mut fam = build_ubb::<f64>(3).unwrap();
        let dup = fam.get("psi_C5_l1_j1-1-1").unwrap().ket.clone();
        fam.push(crate::family::Member {
            label: "copy".into(),
            role: Role::UbbMember,
            layer: None,
            subset: None,
            ket: dup,
        })
        .unwrap();
        let r = verify_orthogonality(&fam, 1e-12).unwrap();
        assert_eq!(r.status, Status::Fail);
        assert_eq!(
            r.witness,
            Some(Witness::Pair { first: "psi_C5_l1_j1-1-1".into(), second: "copy".into() })
        );
    }

    #[test]
    fn complement_is_orthogonal_to_basis() {
        let mut fam = build_ubb::<f64>(3).unwrap();
        fam.extend(build_ges_basis::<f64>(3).unwrap().filtered(|m| m.role == Role::GesBasis)).unwrap();
        assert_eq!(verify_orthogonality(&fam, 1e-12).unwrap().status, Status::Pass);
    }

    #[test]
    fn qutrit_counts() {
        let r = verify_counts(3, &CertifierConfig::default()).unwrap();
        assert_eq!(r.status, Status::Pass, "{:?}", r.notes);
        assert_eq!(r.get_i64("ubb_members"), Some(73));
        assert_eq!(r.get_i64("ges_basis"), Some(8));
        assert_eq!(r.get_i64("psi_plus_seven_dim"), Some(6));
    }
}
