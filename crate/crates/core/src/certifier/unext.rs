use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::ges::complement_kets;
use super::{CertifierConfig, CertifierError, CheckResult, Status, Witness, ANCHOR_UNEXTENDIBILITY};
use crate::linalg::{min_second_singular_with, OptimizerSettings};
use crate::prover::{check_unextendibility_symbolic, ProofOutcome, DEFAULT_MAX_BRANCHES};
use crate::tensor::{Bipartition, Ket};

/// `min σ₂` at or below this is a product state found in the span.
const PRODUCT_FOUND: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UnextMode {
    Symbolic,
    Numeric,
    Both,
}

impl FromStr for UnextMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "symbolic" => Ok(Self::Symbolic),
            "numeric" => Ok(Self::Numeric),
            "both" => Ok(Self::Both),
            _ => Err(format!("unknown mode {s:?} (symbolic, numeric, both)")),
        }
    }
}

/// Minimizes `σ₂` over unit vectors of `span(kets)` across each cut.
///
/// `Fail` with a coefficient witness if a product state is found,
/// `Warn` if every cut stays above `cfg.numeric_floor` (heuristic evidence
/// only), `Inconclusive` in between. `kets` must be orthonormal.
pub fn numeric_unextendibility(
    labels: &[String],
    kets: &[Ket<f64>],
    cfg: &CertifierConfig,
) -> Result<CheckResult, CertifierError> {
    let start = Instant::now();
    let settings = OptimizerSettings { restarts: cfg.restarts, seed: cfg.seed, ..OptimizerSettings::default() };
    let mut r = CheckResult::new("unextendibility_numeric", ANCHOR_UNEXTENDIBILITY);
    r.metric("restarts", cfg.restarts).metric("subspace_dim", kets.len());
    let mut overall: Option<(f64, Bipartition, Vec<f64>, Vec<f64>)> = None;
    for bp in Bipartition::all() {
        let m = min_second_singular_with(kets, bp, &settings)?;
        r.metric(format!("min_sigma2_{bp}"), m.min_sigma2);
        if overall.as_ref().is_none_or(|o| m.min_sigma2 < o.0) {
            let re = m.coefficients.iter().map(|z| z.re).collect();
            let im = m.coefficients.iter().map(|z| z.im).collect();
            overall = Some((m.min_sigma2, bp, re, im));
        }
    }
    let (min, bp, re, im) = overall.expect("seven cuts");
    r.metric("min_sigma2", min).metric("min_sigma2_cut", bp.to_string());
    if min <= PRODUCT_FOUND {
        r.degrade(Status::Fail);
        r.witness = Some(Witness::Coefficients { basis: labels.to_vec(), re, im, bipartition: bp.to_string() });
        r.note(format!("span contains a state with σ₂ = {min:.3e} across {bp}"));
    } else if min > cfg.numeric_floor {
        r.degrade(Status::Warn);
        r.note("numeric evidence only");
    } else {
        r.degrade(Status::Inconclusive);
        r.note(format!("min σ₂ = {min:.3e} is below the floor {} but not zero", cfg.numeric_floor));
    }
    Ok(r.finish(start))
}

/// No state of the complement is product across any cut.
///
/// `Pass` needs a closed symbolic proof for all seven cuts (and, in `Both`
/// mode, no contradicting numeric witness). Numeric evidence alone gives at
/// best `Warn`.
pub fn verify_unextendibility(d: usize, mode: UnextMode, cfg: &CertifierConfig) -> Result<CheckResult, CertifierError> {
    let start = Instant::now();
    let mut r = CheckResult::new("unextendibility", ANCHOR_UNEXTENDIBILITY);
    r.metric("mode", format!("{mode:?}").to_lowercase());
    let mut symbolic_closed = None;
    if mode != UnextMode::Numeric {
        let proofs = check_unextendibility_symbolic(d, DEFAULT_MAX_BRANCHES)?;
        let mut closed = 0;
        let mut branches = 0;
        for p in &proofs {
            branches += p.report.branches;
            let tag = match p.report.outcome {
                ProofOutcome::Closed => {
                    closed += 1;
                    "closed"
                }
                ProofOutcome::Inconclusive => {
                    r.witness.get_or_insert(Witness::Bipartition { bipartition: p.bipartition.to_string() });
                    "open"
                }
            };
            r.metric(format!("symbolic_{}", p.bipartition), tag)
                .metric(format!("symbolic_equations_{}", p.bipartition), p.report.equations);
        }
        r.metric("symbolic_closed", closed).metric("symbolic_cuts", proofs.len()).metric("symbolic_branches", branches);
        symbolic_closed = Some(closed == proofs.len());
    }
    let mut numeric = None;
    if mode != UnextMode::Symbolic {
        let (labels, kets) = complement_kets(d)?;
        let n = numeric_unextendibility(&labels, &kets, cfg)?;
        for (k, v) in &n.metrics {
            if k != "subspace_dim" {
                r.metrics.insert(format!("numeric_{k}"), v.clone());
            }
        }
        numeric = Some(n);
    }
    let status = match (symbolic_closed, &numeric) {
        (_, Some(n)) if n.status == Status::Fail => {
            r.witness = n.witness.clone();
            r.notes.extend(n.notes.iter().cloned());
            Status::Fail
        }
        (Some(true), _) => Status::Pass,
        (_, Some(n)) if n.status == Status::Warn => {
            r.note("no closed symbolic proof; numeric evidence only");
            Status::Warn
        }
        _ => {
            r.note("neither a symbolic proof nor numeric evidence above the floor");
            Status::Inconclusive
        }
    };
    r.degrade(status);
    Ok(r.finish(start))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fake_complement_fails_with_witness() {
        let kets = vec![Ket::basis(3, [0, 0, 0, 0]).unwrap(), Ket::basis(3, [1, 1, 1, 1]).unwrap()];
        let labels = vec!["0000".to_string(), "1111".to_string()];
        let cfg = CertifierConfig { restarts: 10, ..CertifierConfig::default() };
        let r = numeric_unextendibility(&labels, &kets, &cfg).unwrap();
        assert_eq!(r.status, Status::Fail);
        assert!(matches!(r.witness, Some(Witness::Coefficients { .. })));
    }

    #[test]
    fn symbolic_qutrit_passes() {
        let r = verify_unextendibility(3, UnextMode::Symbolic, &CertifierConfig::default()).unwrap();
        assert_eq!(r.status, Status::Pass);
        assert_eq!(r.get_i64("symbolic_closed"), Some(7));
    }
}
