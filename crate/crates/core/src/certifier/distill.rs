use std::str::FromStr;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::ges::complement_kets;
use super::{dense_columns, CertifierConfig, CertifierError, CheckResult, Status, Witness, ANCHOR_DISTILLABILITY};
use crate::family::{build_psi, build_stopper, layer_count, Sign};
use crate::linalg::{nullspace, numeric_rank, orthonormalize_columns};
use crate::rng::{random_unitary, substream};
use crate::tensor::{partial_trace, Bipartition, Ket};
use crate::C64;

/// Substream offset for sub-projector sampling, kept apart from other draws.
const SUBPROJECTOR_STREAM: u64 = 0x5eed_d157;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistillSubspace {
    /// The whole complement of the biseparable basis.
    FullComplement,
    /// States in the span of ψ₊₁..ψ₊₇ of every layer orthogonal to the stopper.
    PsiPlusSeven,
}

impl FromStr for DistillSubspace {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "full_complement" => Ok(Self::FullComplement),
            "psi_plus_seven" => Ok(Self::PsiPlusSeven),
            _ => Err(format!("unknown subspace {s:?} (full_complement, psi_plus_seven)")),
        }
    }
}

/// Orthonormal basis of `{v ∈ span{ψ₊ᵢ^l : i ≤ 7} : ⟨S|v⟩ = 0}`.
pub fn psi_plus_seven_basis(d: usize, tol_rank: f64) -> Result<Vec<Ket<f64>>, CertifierError> {
    let mut gen = Vec::new();
    for l in 1..=layer_count(d) {
        for i in 1..=7 {
            gen.push(build_psi::<f64>(d, l, i, Sign::Plus)?);
        }
    }
    let q = orthonormalize_columns(&dense_columns(&gen), 1e-12);
    let s = build_stopper::<f64>(d)?.to_dense();
    let w = q.adjoint() * s;
    let keep = if w.norm() > 1e-12 { &q * nullspace(&DMatrix::from_row_slice(1, w.len(), w.conjugate().as_slice()), tol_rank)? } else { q };
    (0..keep.ncols()).map(|j| Ok(Ket::from_dense(d, &keep.column(j).into_owned())?)).collect()
}

fn expand(parts: &[&[&str]]) -> Vec<String> {
    parts.iter().fold(vec![String::new()], |acc, part| {
        acc.iter().flat_map(|p| part.iter().map(move |s| format!("{p}{s}"))).collect()
    })
}

/// The nine reduced vectors on parties 2, 3, 4 (unnormalized, `d = 3`), one
/// from the reduction of each spanning state of the qutrit complement, as
/// columns indexed by `9·i₂ + 3·i₃ + i₄`.
pub fn phi1_vectors() -> DMatrix<C64> {
    let sets: [&[&[&str]]; 9] = [
        &[&["000"]],
        &[&["222"]],
        &[&["0"], &["12", "22", "01", "02"]],
        &[&["2"], &["00", "10", "20", "21"]],
        &[&["1", "2"], &["0", "1"], &["0"]],
        &[&["12", "22", "01", "02"], &["0", "1"]],
        &[&["0", "1"], &["1", "2"], &["2"]],
        &[&["00", "10", "20", "21"], &["1", "2"]],
        &[&["111"]],
    ];
    let cols: Vec<DVector<C64>> = sets
        .iter()
        .map(|parts| {
            let mut v = DVector::from_element(27, C64::new(0.0, 0.0));
            for word in expand(parts) {
                let idx = word.bytes().fold(0, |a, b| a * 3 + (b - b'0') as usize);
                v[idx] += C64::new(1.0, 0.0);
            }
            v
        })
        .collect();
    DMatrix::from_columns(&cols)
}

/// Ranks of both reductions of the projector onto `span(kets)` across `bp`.
fn marginal_ranks(kets: &[Ket<f64>], bp: Bipartition, tol: f64) -> Result<(usize, usize), CertifierError> {
    let a = partial_trace(kets, bp.group_a())?.rank(tol)?;
    let b = partial_trace(kets, bp.group_b())?.rank(tol)?;
    Ok((a, b))
}

fn mix(kets: &[Ket<f64>], u: &DMatrix<C64>, cols: usize) -> Result<Vec<Ket<f64>>, CertifierError> {
    let d = kets[0].d();
    (0..cols)
        .map(|j| Ok(Ket::linear_combination(d, kets.iter().enumerate().map(|(i, k)| (u[(i, j)], k)))?))
        .collect()
}

/// Rank test on the projector onto `span(kets)` (orthonormal): across each
/// cut in `asserted`, some reduction must have rank at least `n + 1`. Cuts in
/// `reported` are measured but do not affect the status. The asserted cuts
/// are re-checked on `cfg.subprojectors` random lower-rank sub-projectors.
pub fn verify_distillability_on(
    name: &str,
    kets: &[Ket<f64>],
    asserted: &[Bipartition],
    reported: &[Bipartition],
    cfg: &CertifierConfig,
) -> Result<CheckResult, CertifierError> {
    let start = Instant::now();
    let mut r = CheckResult::new(name, ANCHOR_DISTILLABILITY);
    let n = kets.len();
    if n == 0 {
        return Err(CertifierError::EmptyFamily);
    }
    r.metric("subspace_dim", n);
    for &bp in asserted {
        let (a, b) = marginal_ranks(kets, bp, cfg.tol_rank)?;
        r.metric(format!("rank_{}_{}", bp, bp.group_a()), a).metric(format!("rank_{}_{}", bp, bp.group_b()), b);
        if a.max(b) < n + 1 {
            r.degrade(Status::Fail);
            r.witness.get_or_insert(Witness::Bipartition { bipartition: bp.to_string() });
            r.note(format!("{bp}: marginal ranks {a}, {b} do not exceed {n}"));
        }
    }
    for &bp in reported {
        let (a, b) = marginal_ranks(kets, bp, cfg.tol_rank)?;
        r.metric(format!("unasserted_rank_{}_{}", bp, bp.group_a()), a)
            .metric(format!("unasserted_rank_{}_{}", bp, bp.group_b()), b);
    }
    let mut failures = 0usize;
    if n > 1 {
        for s in 0..cfg.subprojectors {
            let mut rng = substream(cfg.seed ^ SUBPROJECTOR_STREAM, s as u64);
            let k = rng.random_range(1..n);
            let u = random_unitary::<f64>(&mut rng, n);
            let sub = mix(kets, &u, k)?;
            for &bp in asserted {
                let (a, b) = marginal_ranks(&sub, bp, cfg.tol_rank)?;
                if a.max(b) < k + 1 {
                    failures += 1;
                    r.degrade(Status::Fail);
                    r.note(format!("sub-projector {s} (rank {k}) fails across {bp}: ranks {a}, {b}"));
                }
            }
        }
        r.metric("subprojectors", cfg.subprojectors).metric("subprojector_failures", failures);
    }
    Ok(r.finish(start))
}

/// Marginal-rank inequalities for the full complement (single-party cuts)
/// or the reduced ψ₊ subspace (all seven cuts).
pub fn verify_distillability(
    d: usize,
    subspace: DistillSubspace,
    cfg: &CertifierConfig,
) -> Result<CheckResult, CertifierError> {
    let start = Instant::now();
    let two_two: Vec<Bipartition> = Bipartition::all().into_iter().filter(|b| b.group_a().len() == 2).collect();
    let mut r = match subspace {
        DistillSubspace::FullComplement => {
            let (_, kets) = complement_kets(d)?;
            let singles = Bipartition::single_party_cuts();
            verify_distillability_on("distillability_full_complement", &kets, &singles, &two_two, cfg)?
        }
        DistillSubspace::PsiPlusSeven => {
            let kets = psi_plus_seven_basis(d, cfg.tol_rank)?;
            verify_distillability_on("distillability_psi_plus_seven", &kets, &Bipartition::all(), &[], cfg)?
        }
    };
    if d == 3 && subspace == DistillSubspace::FullComplement {
        let rank = numeric_rank(&phi1_vectors(), cfg.tol_rank)?;
        r.metric("phi1_rank", rank);
        if rank != 9 {
            r.degrade(Status::Fail);
            r.note(format!("nine reduced vectors have rank {rank}"));
        }
    }
    Ok(r.finish(start))
}
