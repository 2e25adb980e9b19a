use serde::{Deserialize, Serialize};

use super::PatternMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Status {
    Unknown,
    Zero,
    Nonzero,
}

/// `(row, col)` of a pattern cell.
pub type CellRef = (usize, usize);

/// The 2×2 minor on rows `i < k` and columns `j < l`; rank 1 requires
/// `X_ij·X_kl = X_il·X_kj`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MinorRef {
    pub rows: (usize, usize),
    pub cols: (usize, usize),
}

impl MinorRef {
    pub fn lhs(self) -> [CellRef; 2] {
        [(self.rows.0, self.cols.0), (self.rows.1, self.cols.1)]
    }

    pub fn rhs(self) -> [CellRef; 2] {
        [(self.rows.0, self.cols.1), (self.rows.1, self.cols.0)]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum CloseReason {
    /// Every coefficient vanishes, so the state is zero.
    AllZero,
    /// One nonzero class remains: the stopper overlap is `multiplicity · v ≠ 0`.
    SingleClass { class: Vec<String>, multiplicity: usize },
    /// A minor demands a zero and a nonzero value for the same class.
    Contradiction { minor: MinorRef },
}

/// One step of the case analysis. Replaying the events in order on the
/// pattern reproduces every class and status the engine saw.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum TraceEvent {
    /// Start a branch at `depth`, assigning `status` to the class of `symbol`.
    Branch { depth: usize, symbol: String, status: Status },
    /// R1: `shared` cells are in one nonzero class on opposite sides of the
    /// minor, so the two remaining cells' classes are merged.
    Merge { minor: MinorRef, shared: [CellRef; 2], merged: [CellRef; 2] },
    /// R2: one side of the minor vanishes, so `cell` (whose partner on the
    /// other side is nonzero) must be zero.
    ForceZero { minor: MinorRef, cell: CellRef },
    /// One side of the minor is nonzero, so `cell` on the other side is too.
    ForceNonzero { minor: MinorRef, cell: CellRef },
    Close { reason: CloseReason },
    /// A leaf with at least two nonzero classes: no contradiction found.
    Open { classes: Vec<Vec<String>> },
}

#[derive(Clone)]
pub(crate) struct Classes {
    parent: Vec<usize>,
    status: Vec<Status>,
    members: Vec<Vec<usize>>,
}

impl Classes {
    pub(crate) fn new(n: usize, zero: Option<usize>) -> Self {
        let mut status = vec![Status::Unknown; n];
        if let Some(z) = zero {
            status[z] = Status::Zero;
        }
        Self { parent: (0..n).collect(), status, members: (0..n).map(|i| vec![i]).collect() }
    }

    pub(crate) fn find(&self, mut x: usize) -> usize {
        while self.parent[x] != x {
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn status(&self, x: usize) -> Status {
        self.status[self.find(x)]
    }

    pub(crate) fn members(&self, x: usize) -> &[usize] {
        &self.members[self.find(x)]
    }

    /// Sets the status of `x`'s class; `false` on a Zero/Nonzero conflict.
    pub(crate) fn set(&mut self, x: usize, s: Status) -> bool {
        let r = self.find(x);
        match (self.status[r], s) {
            (Status::Zero, Status::Nonzero) | (Status::Nonzero, Status::Zero) => false,
            _ => {
                if s != Status::Unknown {
                    self.status[r] = s;
                }
                true
            }
        }
    }

    /// Merges two classes, returning the new root, or `None` on conflict.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> Option<usize> {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return Some(ra);
        }
        let s = match (self.status[ra], self.status[rb]) {
            (Status::Zero, Status::Nonzero) | (Status::Nonzero, Status::Zero) => return None,
            (Status::Unknown, s) | (s, Status::Unknown) => s,
            (s, _) => s,
        };
        let (keep, gone) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[gone] = keep;
        let moved = std::mem::take(&mut self.members[gone]);
        self.members[keep].extend(moved);
        self.members[keep].sort_unstable();
        self.status[keep] = s;
        Some(keep)
    }

    pub(crate) fn roots(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.parent.len()).filter(|&i| self.parent[i] == i)
    }
}

fn fail(step: usize, msg: impl Into<String>) -> Result<(), String> {
    Err(format!("event {step}: {}", msg.into()))
}

/// Re-executes a proof trace against `pattern`, checking that every rule
/// application is justified by the cited minor and the classes at that point,
/// and that every closing reason holds.
pub fn replay_trace(pattern: &PatternMatrix, trace: &[TraceEvent]) -> Result<(), String> {
    let n = pattern.alphabet().len();
    let mult = pattern.multiplicity();
    let sym = |c: CellRef| pattern.cell(c.0, c.1);
    let check_minor = |m: &MinorRef| m.rows.0 < m.rows.1 && m.cols.0 < m.cols.1 && m.rows.1 < pattern.rows() && m.cols.1 < pattern.cols();
    let mut stack: Vec<Classes> = Vec::new();
    let mut cur = Classes::new(n, pattern.zero_symbol());
    for (step, ev) in trace.iter().enumerate() {
        match ev {
            TraceEvent::Branch { depth, symbol, status } => {
                if *depth == stack.len() {
                    stack.push(cur.clone());
                } else if *depth < stack.len() {
                    stack.truncate(depth + 1);
                } else {
                    return fail(step, "branch skips a level");
                }
                cur = stack[*depth].clone();
                let Some(s) = pattern.alphabet().iter().position(|a| a == symbol) else {
                    return fail(step, format!("unknown symbol {symbol}"));
                };
                if cur.status(s) != Status::Unknown {
                    return fail(step, "branch on a decided class");
                }
                cur.set(s, *status);
            }
            TraceEvent::Merge { minor, shared, merged } => {
                if !check_minor(minor) {
                    return fail(step, "malformed minor");
                }
                let (l, r) = (minor.lhs(), minor.rhs());
                let sides_ok = (l.contains(&shared[0]) && r.contains(&shared[1]) && l.contains(&merged[0]) && r.contains(&merged[1]))
                    && shared[0] != merged[0]
                    && shared[1] != merged[1];
                if !sides_ok {
                    return fail(step, "merge cells are not opposite pairs of the minor");
                }
                let (a, b) = (sym(shared[0]), sym(shared[1]));
                if cur.find(a) != cur.find(b) || cur.status(a) != Status::Nonzero {
                    return fail(step, "shared cells are not one nonzero class");
                }
                if cur.union(sym(merged[0]), sym(merged[1])).is_none() {
                    return fail(step, "merge of zero and nonzero class recorded as a merge");
                }
            }
            TraceEvent::ForceZero { minor, cell } | TraceEvent::ForceNonzero { minor, cell } => {
                if !check_minor(minor) {
                    return fail(step, "malformed minor");
                }
                let (l, r) = (minor.lhs(), minor.rhs());
                let (own, other) = if l.contains(cell) { (l, r) } else if r.contains(cell) { (r, l) } else {
                    return fail(step, "cell not in minor");
                };
                let partner = if own[0] == *cell { own[1] } else { own[0] };
                let other_zero = other.iter().any(|&c| cur.status(sym(c)) == Status::Zero);
                let other_nz = other.iter().all(|&c| cur.status(sym(c)) == Status::Nonzero);
                let ok = match ev {
                    TraceEvent::ForceZero { .. } => other_zero && cur.status(sym(partner)) == Status::Nonzero,
                    _ => other_nz,
                };
                if !ok {
                    return fail(step, "forcing not justified by the minor");
                }
                let s = if matches!(ev, TraceEvent::ForceZero { .. }) { Status::Zero } else { Status::Nonzero };
                if !cur.set(sym(*cell), s) {
                    return fail(step, "forcing conflicts with the class status");
                }
            }
            TraceEvent::Close { reason } => match reason {
                CloseReason::AllZero => {
                    if (0..n).any(|s| cur.status(s) != Status::Zero) {
                        return fail(step, "not every class is zero");
                    }
                }
                CloseReason::SingleClass { class, multiplicity } => {
                    let nz: Vec<usize> = cur.roots().filter(|&r| cur.status(r) == Status::Nonzero).collect();
                    let unknown = (0..n).any(|s| cur.status(s) == Status::Unknown);
                    if nz.len() != 1 || unknown {
                        return fail(step, "more than one live class");
                    }
                    let names: Vec<String> = cur.members(nz[0]).iter().map(|&s| pattern.alphabet()[s].clone()).collect();
                    let m: usize = cur.members(nz[0]).iter().map(|&s| mult[s]).sum();
                    if &names != class || m != *multiplicity || m == 0 {
                        return fail(step, "class or multiplicity mismatch");
                    }
                }
                CloseReason::Contradiction { minor } => {
                    if !check_minor(minor) {
                        return fail(step, "malformed minor");
                    }
                    let st = |c: CellRef| cur.status(sym(c));
                    let (l, r) = (minor.lhs(), minor.rhs());
                    let zero = |s: &[CellRef; 2]| s.iter().any(|&c| st(c) == Status::Zero);
                    let nz = |s: &[CellRef; 2]| s.iter().all(|&c| st(c) == Status::Nonzero);
                    let direct = (zero(&l) && nz(&r)) || (zero(&r) && nz(&l));
                    let via_merge = l.iter().any(|&a| {
                        r.iter().any(|&b| {
                            let (oa, ob) = (if l[0] == a { l[1] } else { l[0] }, if r[0] == b { r[1] } else { r[0] });
                            cur.find(sym(a)) == cur.find(sym(b))
                                && st(a) == Status::Nonzero
                                && matches!((st(oa), st(ob)), (Status::Zero, Status::Nonzero) | (Status::Nonzero, Status::Zero))
                        })
                    });
                    if !(direct || via_merge) {
                        return fail(step, "minor does not contradict");
                    }
                }
            },
            TraceEvent::Open { .. } => {}
        }
    }
    Ok(())
}
