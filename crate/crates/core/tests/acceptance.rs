//! Acceptance checks, one PASS/FAIL line per criterion. Runs without the
//! libtest harness so the lines always reach the output; exits non-zero if
//! any criterion fails.

use std::time::Instant;

use ubblab::certifier::{
    biseparability_witness, complement_kets, numeric_unextendibility, phi1_vectors, verify_biseparability,
    verify_counts, verify_distillability, verify_ges, verify_orthogonality, verify_strong_nonlocality,
    verify_unextendibility, CertifierConfig, CheckResult, DistillSubspace, Status, UnextMode,
};
use ubblab::family::{build_psi, build_stopper, build_ubb, layer_count, psi_plus_family, Sign};
use ubblab::linalg::{
    constraint_residual, hermitian_constraint_nullspace, numeric_rank, singular_values, Accumulation,
};
use ubblab::prover::{
    check_unextendibility_symbolic, derive_pattern, instantiate, replay_trace, symbolic_basis, ProofOutcome,
    DEFAULT_MAX_BRANCHES,
};
use ubblab::rng::{random_unit_vector, seeded};
use ubblab::tensor::{inner, matricize, partial_trace, schmidt_values, Bipartition, Ket, PartySet};
use ubblab::C64;

type Verdict = Result<Vec<String>, String>;

/// Collects failed sub-checks so one line can report all of them.
#[derive(Default)]
struct Sub {
    failed: Vec<String>,
    info: Vec<String>,
}

impl Sub {
    fn check(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failed.push(what.into());
        }
    }

    fn info(&mut self, what: impl Into<String>) {
        self.info.push(what.into());
    }

    fn done(self) -> Verdict {
        if self.failed.is_empty() {
            Ok(self.info)
        } else {
            Err(self.failed.join("; "))
        }
    }
}

fn run(n: usize, title: &str, budget: f64, f: impl FnOnce() -> Verdict) -> bool {
    let start = Instant::now();
    let verdict = f();
    let secs = start.elapsed().as_secs_f64();
    let over = secs > budget;
    let (ok, detail) = match verdict {
        Ok(info) if !over => (true, info.join(", ")),
        Ok(info) => (false, format!("over time budget; {}", info.join(", "))),
        Err(why) => (false, why),
    };
    let tag = if ok { "PASS" } else { "FAIL" };
    println!("criterion {n} ({title}): {tag} [{secs:.1} s / {budget:.0} s] {detail}");
    ok
}

fn metric(r: &CheckResult, key: &str) -> f64 {
    r.get_f64(key).unwrap_or(f64::NAN)
}

fn counts() -> Verdict {
    let mut s = Sub::default();
    for (d, want) in [(3, 73), (4, 248), (5, 609)] {
        let r = verify_counts(d, &CertifierConfig::default()).map_err(|e| e.to_string())?;
        let got = r.get_i64("ubb_members").unwrap_or(-1);
        let rank = r.get_i64("ubb_rank").unwrap_or(-1);
        s.check(got == want, format!("d={d}: {got} members, expected {want}"));
        s.check(rank == want, format!("d={d}: stacked rank {rank}"));
        s.info(format!("d={d}: {got} members, rank {rank}"));
    }
    s.done()
}

fn orthogonality() -> Verdict {
    let mut s = Sub::default();
    for d in [3, 4, 5] {
        let fam = build_ubb::<f64>(d).map_err(|e| e.to_string())?;
        let r = verify_orthogonality(&fam, 1e-12).map_err(|e| e.to_string())?;
        let w = metric(&r, "worst_overlap");
        s.check(r.status == Status::Pass && w <= 1e-12, format!("d={d}: worst overlap {w:e}"));
        s.info(format!("d={d}: worst {w:.1e}"));
    }
    s.done()
}

fn canonical_witness(k: &Ket<f64>) -> Option<Bipartition> {
    biseparability_witness(k, 1e-10).ok().flatten().map(|(bp, _)| bp.canonical())
}

fn biseparability() -> Verdict {
    let mut s = Sub::default();
    for d in [3, 4, 5] {
        let fam = build_ubb::<f64>(d).map_err(|e| e.to_string())?;
        let r = verify_biseparability(&fam, 1e-10).map_err(|e| e.to_string())?;
        s.check(r.status == Status::Pass, format!("d={d}: {:?}", r.witness));
        s.info(format!("d={d}: {} members", r.get_i64("checked").unwrap_or(0)));
    }
    // displayed product structures of the qutrit members
    let fam = build_ubb::<f64>(3).map_err(|e| e.to_string())?;
    let product_across = |k: &Ket<f64>, cut: &str| -> bool {
        let sv = schmidt_values(k, cut.parse().unwrap()).unwrap();
        sv[1] <= 1e-10 * sv[0]
    };
    for i in 1..=8 {
        let cut = if i <= 4 { "34|12" } else { "14|23" };
        let k = &fam.get(&format!("psiMinus_U{i}_l1")).ok_or("missing ψ₋")?.ket;
        s.check(product_across(k, cut), format!("ψ₋U{i} not product across {cut}"));
        s.check(canonical_witness(k).is_some(), format!("ψ₋U{i} has no witness"));
    }
    let plus = psi_plus_family::<f64>(3).map_err(|e| e.to_string())?;
    let u5 = &plus.get("psiPlus_U5_l1").ok_or("missing ψ₊U5")?.ket;
    s.check(product_across(u5, "23|41"), "ψ₊U5 not product across 23|41");
    let stopper = build_stopper::<f64>(3).map_err(|e| e.to_string())?;
    for bp in Bipartition::all() {
        let sv = schmidt_values(&stopper, bp).map_err(|e| e.to_string())?;
        s.check(sv[1] <= 1e-10 * sv[0], format!("stopper entangled across {bp}"));
    }
    s.info("qutrit ψ₋ U1-U4 product across 12|34, U5-U8 across 14|23, ψ₊U5 across 23|41".to_string());
    s.done()
}

fn ges() -> Verdict {
    let mut s = Sub::default();
    let cfg = CertifierConfig::default();
    let r = verify_ges(3, &cfg).map_err(|e| e.to_string())?;
    let (lo, hi) = (metric(&r, "closed_form_cross_sv_min"), metric(&r, "closed_form_cross_sv_max"));
    s.check((lo - 1.0).abs() <= 1e-8 && (hi - 1.0).abs() <= 1e-8, format!("d=3 cross singular values in [{lo}, {hi}]"));
    let ov = metric(&r, "max_overlap_with_ubb");
    s.check(ov <= 1e-10, format!("d=3 overlap with basis {ov:e}"));
    let ent = metric(&r, "basis_min_ratio");
    s.check(ent > 1e-6, format!("d=3 basis min σ₂/σ₁ {ent:e}"));
    s.check(r.status == Status::Pass, format!("d=3 status {}", r.status));
    s.info(format!("d=3: cross σ ∈ [{lo:.12}, {hi:.12}], min σ₂/σ₁ {ent:.3}"));

    let r = verify_ges(5, &cfg).map_err(|e| e.to_string())?;
    let g8 = metric(&r, "g8_cross_layer_max");
    s.check(g8.is_finite(), "d=5 G8 overlaps not reported");
    let ov = metric(&r, "max_overlap_with_ubb");
    let ent = metric(&r, "basis_min_ratio").min(metric(&r, "random_min_ratio"));
    s.check(ov <= 1e-10, format!("d=5 fallback overlap with basis {ov:e}"));
    s.check(ent > 1e-6, format!("d=5 fallback min σ₂/σ₁ {ent:e}"));
    s.check(r.status != Status::Fail, format!("d=5 status {}", r.status));
    s.info(format!("d=5: literal G8 max overlap {g8:.3} (reported), fallback min σ₂/σ₁ {ent:.3}"));
    s.done()
}

fn unextendibility() -> Verdict {
    let mut s = Sub::default();
    let cfg = CertifierConfig::default();
    let r = verify_unextendibility(3, UnextMode::Symbolic, &cfg).map_err(|e| e.to_string())?;
    let closed = r.get_i64("symbolic_closed").unwrap_or(0);
    s.check(closed == 7 && r.status == Status::Pass, format!("{closed}/7 closed"));
    let proofs = check_unextendibility_symbolic(3, DEFAULT_MAX_BRANCHES).map_err(|e| e.to_string())?;
    for p in &proofs {
        s.check(p.report.outcome == ProofOutcome::Closed, format!("{} open", p.bipartition));
        s.check(replay_trace(&p.pattern, &p.report.trace).is_ok(), format!("{} trace replay", p.bipartition));
    }
    // derived patterns against numeric instantiation
    let (kets, symbols) = symbolic_basis(3).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for (n, bp) in Bipartition::all().into_iter().enumerate() {
        let pattern = derive_pattern(&kets, &symbols, bp).map_err(|e| e.to_string())?;
        for t in 0..50u64 {
            let v: Vec<C64> = random_unit_vector::<f64>(&mut seeded(t * 7 + n as u64), kets.len()).iter().copied().collect();
            let phi = Ket::linear_combination(3, v.iter().copied().zip(kets.iter())).map_err(|e| e.to_string())?;
            worst = worst.max((matricize(&phi, bp) - instantiate(&pattern, &v)).norm());
        }
    }
    s.check(worst < 1e-12, format!("pattern/instantiation mismatch {worst:e}"));
    let (labels, basis) = complement_kets(3).map_err(|e| e.to_string())?;
    let num = numeric_unextendibility(&labels, &basis, &cfg).map_err(|e| e.to_string())?;
    let min = metric(&num, "min_sigma2");
    s.check(min > 0.01, format!("numeric min σ₂ {min}"));
    s.info(format!("7/7 closed, pattern mismatch {worst:.0e}, numeric min σ₂ {min:.4} over 200 restarts/cut"));
    s.done()
}

fn nonlocality() -> Verdict {
    let mut s = Sub::default();
    for (d, budget) in [(3, 60.0), (4, 900.0)] {
        let start = Instant::now();
        let r = verify_strong_nonlocality(d, &[1, 2, 3, 4], false).map_err(|e| e.to_string())?;
        let secs = start.elapsed().as_secs_f64();
        for p in 1..=4 {
            let dim = r.get_i64(&format!("party{p}_nullspace_dim")).unwrap_or(-1);
            let ov = metric(&r, &format!("party{p}_identity_overlap"));
            s.check(dim == 1 && (ov - 1.0).abs() <= 1e-8, format!("d={d} party {p}: dim {dim}, identity overlap {ov}"));
        }
        s.check(secs <= budget, format!("d={d} took {secs:.0} s (budget {budget} s)"));
        s.info(format!("d={d}: 4/4 parties trivial on {}-dim side in {secs:.0} s", d * d * d));
    }
    s.done()
}

fn distillability() -> Verdict {
    let mut s = Sub::default();
    let cfg = CertifierConfig::default();
    let rank = numeric_rank(&phi1_vectors(), 1e-9).map_err(|e| e.to_string())?;
    s.check(rank == 9, format!("nine reduced vectors have rank {rank}"));
    for d in [3, 4, 5] {
        let n_full = 8 * layer_count(d);
        let full = verify_distillability(d, DistillSubspace::FullComplement, &cfg).map_err(|e| e.to_string())?;
        for bp in Bipartition::single_party_cuts() {
            let r = full.get_i64(&format!("rank_{}_{}", bp, bp.group_b())).unwrap_or(-1);
            s.check(r >= n_full as i64 + 1, format!("d={d} full complement {bp}: rank {r} < {}", n_full + 1));
        }
        let n7 = 7 * layer_count(d) - 1;
        let seven = verify_distillability(d, DistillSubspace::PsiPlusSeven, &cfg).map_err(|e| e.to_string())?;
        s.check(seven.get_i64("subspace_dim") == Some(n7 as i64), format!("d={d} ψ₊-seven dimension"));
        for bp in Bipartition::all() {
            let a = seven.get_i64(&format!("rank_{}_{}", bp, bp.group_a())).unwrap_or(-1);
            let b = seven.get_i64(&format!("rank_{}_{}", bp, bp.group_b())).unwrap_or(-1);
            s.check(a.max(b) >= n7 as i64 + 1, format!("d={d} ψ₊-seven {bp}: ranks {a},{b} < {}", n7 + 1));
        }
        s.info(format!("d={d}: full {} / ψ₊-seven {}", full.status, seven.status));
    }
    s.done()
}

fn properties() -> Verdict {
    let mut s = Sub::default();
    // matricization and inner products, Schmidt conservation, partial trace
    let mut worst_inner = 0.0f64;
    let mut worst_norm = 0.0f64;
    let mut worst_trace = 0.0f64;
    for t in 0..100u64 {
        let u = Ket::from_dense(3, &random_unit_vector::<f64>(&mut seeded(2 * t), 81)).unwrap();
        let v = Ket::from_dense(3, &random_unit_vector::<f64>(&mut seeded(2 * t + 1), 81)).unwrap();
        let bp = Bipartition::all()[t as usize % 7];
        let direct = inner(&u, &v).unwrap();
        worst_inner = worst_inner.max((direct - matricize(&u, bp).dotc(&matricize(&v, bp))).norm());
        let sv = schmidt_values(&u, bp).unwrap();
        worst_norm = worst_norm.max((sv.iter().map(|x| x * x).sum::<f64>() - 1.0).abs());
        let keep = PartySet::from_mask((t % 14 + 1) as u8).unwrap();
        worst_trace = worst_trace.max((partial_trace(&[u], keep).unwrap().trace() - C64::new(1.0, 0.0)).norm());
    }
    s.check(worst_inner <= 1e-12, format!("inner/matricization {worst_inner:e}"));
    s.check(worst_norm <= 1e-10, format!("Schmidt conservation {worst_norm:e}"));
    s.check(worst_trace <= 1e-12, format!("partial trace {worst_trace:e}"));

    // nullspace residual
    let fam = build_ubb::<f64>(3).unwrap();
    let kets = fam.kets();
    let n = kets.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    let measured = PartySet::single(1).unwrap().complement();
    let ns = hermitian_constraint_nullspace(27, &kets, &pairs, measured, Accumulation::Parallel).unwrap();
    let residual = ns
        .basis
        .iter()
        .map(|h| constraint_residual(&kets, &pairs, measured, h).unwrap() / h.norm())
        .fold(0.0, f64::max);
    s.check(residual <= 1e-9, format!("nullspace residual {residual:e}"));

    // prover soundness spot-check
    let (skets, symbols) = symbolic_basis(3).unwrap();
    let patterns: Vec<_> = Bipartition::all().iter().map(|&bp| derive_pattern(&skets, &symbols, bp).unwrap()).collect();
    let stopper = build_stopper::<f64>(3).unwrap();
    let overlaps: Vec<C64> = skets.iter().map(|k| inner(&stopper, k).unwrap()).collect();
    let w: f64 = overlaps.iter().map(|z| z.norm_sqr()).sum();
    let mut worst_ratio = f64::INFINITY;
    for t in 0..2000u64 {
        let mut v: Vec<C64> = random_unit_vector::<f64>(&mut seeded(10_000 + t), skets.len()).iter().copied().collect();
        let ov: C64 = v.iter().zip(&overlaps).map(|(c, o)| o.conj() * c).sum();
        for (c, o) in v.iter_mut().zip(&overlaps) {
            *c -= *o * ov / w;
        }
        for p in &patterns {
            let sv = singular_values(&instantiate(p, &v)).unwrap();
            worst_ratio = worst_ratio.min(sv[1] / sv[0]);
        }
    }
    s.check(worst_ratio > 1e-6, format!("soundness spot-check min σ₂/σ₁ {worst_ratio:e}"));
    // ψ states of every layer are orthogonal to their partners
    for d in [3, 4, 5] {
        for l in 1..=layer_count(d) {
            for i in 1..=8 {
                let a = build_psi::<f64>(d, l, i, Sign::Plus).unwrap();
                let b = build_psi::<f64>(d, l, i, Sign::Minus).unwrap();
                s.check(inner(&a, &b).unwrap().norm() < 1e-12, format!("ψ± overlap d={d} l={l} i={i}"));
            }
        }
    }
    s.info(format!(
        "inner {worst_inner:.0e}, Schmidt {worst_norm:.0e}, trace {worst_trace:.0e}, residual {residual:.0e}, soundness {worst_ratio:.3}"
    ));
    s.info("full suites: tests/properties.rs, tests/prover_patterns.rs".to_string());
    s.done()
}

fn main() {
    let results = [
        run(1, "counts and independence", 10.0, counts),
        run(2, "orthogonality", 30.0, orthogonality),
        run(3, "biseparability", 10.0, biseparability),
        run(4, "complement basis", 10.0, ges),
        run(5, "unextendibility", 120.0, unextendibility),
        run(6, "strong nonlocality", 960.0, nonlocality),
        run(7, "distillability", 60.0, distillability),
        run(8, "property suites", 120.0, properties),
    ];
    let passed = results.iter().filter(|&&r| r).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
