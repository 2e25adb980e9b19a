use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::trace::Classes;
use super::{CellRef, CloseReason, MinorRef, PatternMatrix, ProverError, Status, TraceEvent};

pub const DEFAULT_MAX_BRANCHES: usize = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProofOutcome {
    /// Every branch ends in a contradiction: no rank-1 matrix fits the
    /// pattern with zero stopper overlap.
    Closed,
    /// Some leaf keeps two or more nonzero classes.
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProofReport {
    pub outcome: ProofOutcome,
    /// Distinct non-trivial minor equations.
    pub equations: usize,
    pub branches: usize,
    pub closed_leaves: usize,
    pub open_leaves: usize,
    pub trace: Vec<TraceEvent>,
}

fn zero_side(cls: &Classes, p: &PatternMatrix, side: &[CellRef; 2]) -> bool {
    side.iter().any(|&(r, c)| cls.status(p.cell(r, c)) == Status::Zero)
}

fn nonzero_side(cls: &Classes, p: &PatternMatrix, side: &[CellRef; 2]) -> bool {
    side.iter().all(|&(r, c)| cls.status(p.cell(r, c)) == Status::Nonzero)
}

enum Step {
    Idle,
    Changed(Vec<usize>),
    Conflict,
}

struct Engine<'a> {
    p: &'a PatternMatrix,
    minors: Vec<MinorRef>,
    touching: Vec<Vec<usize>>,
    mult: Vec<usize>,
    max_branches: usize,
    branches: usize,
    closed: usize,
    open: usize,
    trace: Vec<TraceEvent>,
}

impl<'a> Engine<'a> {
    fn new(p: &'a PatternMatrix, max_branches: usize) -> Self {
        let mut seen: HashMap<([usize; 2], [usize; 2]), usize> = HashMap::new();
        let mut minors = Vec::new();
        for i in 0..p.rows() {
            for k in i + 1..p.rows() {
                for j in 0..p.cols() {
                    for l in j + 1..p.cols() {
                        let m = MinorRef { rows: (i, k), cols: (j, l) };
                        let side = |s: [CellRef; 2]| {
                            let mut v = [p.cell(s[0].0, s[0].1), p.cell(s[1].0, s[1].1)];
                            v.sort_unstable();
                            v
                        };
                        let (a, b) = (side(m.lhs()), side(m.rhs()));
                        if a == b {
                            continue;
                        }
                        let key = if a < b { (a, b) } else { (b, a) };
                        seen.entry(key).or_insert_with(|| {
                            minors.push(m);
                            minors.len() - 1
                        });
                    }
                }
            }
        }
        let mut touching = vec![Vec::new(); p.alphabet().len()];
        for (e, m) in minors.iter().enumerate() {
            for (r, c) in m.lhs().into_iter().chain(m.rhs()) {
                let s = p.cell(r, c);
                if touching[s].last() != Some(&e) {
                    touching[s].push(e);
                }
            }
        }
        Self {
            p,
            minors,
            touching,
            mult: p.multiplicity(),
            max_branches,
            branches: 0,
            closed: 0,
            open: 0,
            trace: Vec::new(),
        }
    }

    fn apply(&mut self, e: usize, cls: &mut Classes) -> Step {
        let p = self.p;
        let m = self.minors[e];
        let sym = |c: CellRef| p.cell(c.0, c.1);
        let (l, r) = (m.lhs(), m.rhs());
        let (lz, rz) = (zero_side(cls, p, &l), zero_side(cls, p, &r));
        if lz && rz {
            return Step::Idle;
        }
        if lz || rz {
            let other = if lz { r } else { l };
            if nonzero_side(cls, p, &other) {
                return Step::Conflict;
            }
            for i in 0..2 {
                let (known, free) = (other[i], other[1 - i]);
                if cls.status(sym(known)) == Status::Nonzero && cls.status(sym(free)) == Status::Unknown {
                    cls.set(sym(free), Status::Zero);
                    self.trace.push(TraceEvent::ForceZero { minor: m, cell: free });
                    return Step::Changed(vec![sym(free)]);
                }
            }
            return Step::Idle;
        }
        for (side, other) in [(l, r), (r, l)] {
            if nonzero_side(cls, p, &side) {
                let mut changed = Vec::new();
                for c in other {
                    if cls.status(sym(c)) == Status::Unknown {
                        cls.set(sym(c), Status::Nonzero);
                        self.trace.push(TraceEvent::ForceNonzero { minor: m, cell: c });
                        changed.push(sym(c));
                    }
                }
                if !changed.is_empty() {
                    return Step::Changed(changed);
                }
            }
        }
        let root = |c: CellRef| cls.find(sym(c));
        let mut lr = [root(l[0]), root(l[1])];
        let mut rr = [root(r[0]), root(r[1])];
        lr.sort_unstable();
        rr.sort_unstable();
        if lr == rr {
            return Step::Idle;
        }
        for a in 0..2 {
            for b in 0..2 {
                if root(l[a]) == root(r[b]) && cls.status(sym(l[a])) == Status::Nonzero {
                    let (oa, ob) = (l[1 - a], r[1 - b]);
                    return match cls.union(sym(oa), sym(ob)) {
                        None => Step::Conflict,
                        Some(_) => {
                            self.trace.push(TraceEvent::Merge { minor: m, shared: [l[a], r[b]], merged: [oa, ob] });
                            Step::Changed(vec![sym(oa)])
                        }
                    };
                }
            }
        }
        Step::Idle
    }

    /// Runs the worklist to a fixpoint; `false` when a branch contradiction
    /// was found (already recorded).
    fn propagate(&mut self, cls: &mut Classes, mut queue: VecDeque<usize>) -> bool {
        let mut queued = vec![false; self.minors.len()];
        for &e in &queue {
            queued[e] = true;
        }
        while let Some(e) = queue.pop_front() {
            queued[e] = false;
            match self.apply(e, cls) {
                Step::Idle => {}
                Step::Conflict => {
                    self.trace.push(TraceEvent::Close { reason: CloseReason::Contradiction { minor: self.minors[e] } });
                    self.closed += 1;
                    return false;
                }
                Step::Changed(symbols) => {
                    for s in symbols {
                        for &member in cls.members(s) {
                            for &f in &self.touching[member] {
                                if !queued[f] {
                                    queued[f] = true;
                                    queue.push_back(f);
                                }
                            }
                        }
                    }
                    if !queued[e] {
                        queued[e] = true;
                        queue.push_back(e);
                    }
                }
            }
        }
        true
    }

    fn leaf(&mut self, cls: &Classes) {
        let names = |r: usize| -> Vec<String> { cls.members(r).iter().map(|&s| self.p.alphabet()[s].clone()).collect() };
        let live: Vec<usize> = cls.roots().filter(|&r| cls.status(r) == Status::Nonzero).collect();
        match live.len() {
            0 => {
                self.trace.push(TraceEvent::Close { reason: CloseReason::AllZero });
                self.closed += 1;
            }
            1 => {
                let multiplicity = cls.members(live[0]).iter().map(|&s| self.mult[s]).sum();
                self.trace.push(TraceEvent::Close {
                    reason: CloseReason::SingleClass { class: names(live[0]), multiplicity },
                });
                self.closed += 1;
            }
            _ => {
                self.trace.push(TraceEvent::Open { classes: live.iter().map(|&r| names(r)).collect() });
                self.open += 1;
            }
        }
    }

    fn dfs(&mut self, cls: Classes, depth: usize) -> Result<(), ProverError> {
        let unknown = cls
            .roots()
            .filter(|&r| cls.status(r) == Status::Unknown)
            .map(|r| (cls.members(r).iter().map(|&s| self.mult[s]).sum::<usize>(), r))
            .max_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)));
        let Some((_, pick)) = unknown else {
            self.leaf(&cls);
            return Ok(());
        };
        for status in [Status::Zero, Status::Nonzero] {
            self.branches += 1;
            if self.branches > self.max_branches {
                return Err(ProverError::BranchBudgetExceeded(self.max_branches));
            }
            let mut c = cls.clone();
            self.trace.push(TraceEvent::Branch { depth, symbol: self.p.alphabet()[pick].clone(), status });
            c.set(pick, status);
            let queue: VecDeque<usize> =
                c.members(pick).iter().flat_map(|&s| self.touching[s].iter().copied()).collect();
            if self.propagate(&mut c, queue) {
                self.dfs(c, depth + 1)?;
            }
        }
        Ok(())
    }
}

/// Case analysis over zero/nonzero assignments of the pattern's symbol
/// classes, closing a branch only on a contradiction with rank 1 or with a
/// vanishing stopper overlap (the sum of all cells).
pub fn prove_no_rank1(p: &PatternMatrix, max_branches: usize) -> Result<ProofReport, ProverError> {
    let mut eng = Engine::new(p, max_branches);
    let mut cls = Classes::new(p.alphabet().len(), p.zero_symbol());
    let all: VecDeque<usize> = (0..eng.minors.len()).collect();
    if eng.propagate(&mut cls, all) {
        eng.dfs(cls, 0)?;
    }
    Ok(ProofReport {
        outcome: if eng.open == 0 { ProofOutcome::Closed } else { ProofOutcome::Inconclusive },
        equations: eng.minors.len(),
        branches: eng.branches,
        closed_leaves: eng.closed,
        open_leaves: eng.open,
        trace: eng.trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prover::replay_trace;

    #[test]
    fn two_by_two_closes() {
        let p = PatternMatrix::parse("a a\na b");
        let rep = prove_no_rank1(&p, 64).unwrap();
        assert_eq!(rep.outcome, ProofOutcome::Closed);
        replay_trace(&p, &rep.trace).unwrap();
    }

    #[test]
    fn free_rank_one_pattern_stays_open() {
        // [[a,b],[a,b]] is rank 1 for any a, b; a = −b meets the side condition
        let p = PatternMatrix::parse("a b\na b");
        let rep = prove_no_rank1(&p, 64).unwrap();
        assert_eq!(rep.outcome, ProofOutcome::Inconclusive);
        replay_trace(&p, &rep.trace).unwrap();
    }

    #[test]
    fn budget_is_enforced() {
        let p = PatternMatrix::parse("a b\nc e");
        assert_eq!(prove_no_rank1(&p, 1).unwrap_err(), ProverError::BranchBudgetExceeded(1));
    }

    #[test]
    fn tampered_trace_is_rejected() {
        let p = PatternMatrix::parse("a a\na b");
        let rep = prove_no_rank1(&p, 64).unwrap();
        let mut bad = rep.trace.clone();
        let pos = bad.iter().position(|e| matches!(e, TraceEvent::Close { .. })).unwrap();
        bad[pos] = TraceEvent::Close { reason: CloseReason::SingleClass { class: vec!["b".into()], multiplicity: 3 } };
        assert!(replay_trace(&p, &bad).is_err());
    }
}
