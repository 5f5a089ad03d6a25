//! Supermartingale checks and constructive Doob decompositions
//! `f_i = f_0 + Σ_{j<i} H_j Δ_j S − A_i + Σ_{j<i} δ_j` off an exception set.
//!
//! The exception set is the set of trajectories on which the stopping time
//! `τ#` is finite: (L) fails at a node, the one-step supermartingale
//! inequality fails at a node, or a type I arbitrage node is left with a
//! nonzero move. It does not depend on the slacks `δ_j`. At up-down nodes
//! before `τ#` the hedge is an optimal one-step superhedge of `f_{j+1}` when
//! one exists and otherwise a finite hedge of cost at most `f_j + δ_j`, found
//! by the feasibility form of the exchange method.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::analysis::{AnalysisReport, LStatus, NodeClass};
use crate::model::{
    slot_increment, ChildRef, FamilyId, HedgeSequence, ModelError, NodeId, ProcessSequence, Slot, TrajectoryTree,
};
use crate::num::{fmt_q, parse_q, ExtQ, Q};
use crate::poly::Poly;
use crate::pricing::{sigma_bar, Constraint, FamilyTerm, Feasibility, PricingConfig, PricingError, StepProgram};
use crate::pwl::Line;

/// A cylinder of the exception set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum ExceptionCylinder {
    /// Every trajectory through an explicit node.
    Node(NodeId),
    /// The members of a family with nonzero increment.
    NonzeroMembers(FamilyId),
}

/// Which trajectories through a slot are outside the exception set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Kept {
    All,
    Members(Vec<u64>),
    None,
}

/// A decomposition with its exception set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub base: Q,
    /// `δ_j` for `j = 0 .. T−1`.
    pub deltas: Vec<Q>,
    pub hedge: HedgeSequence,
    /// `α_j` stored at the slot of date `j + 1` it is realized on.
    pub alpha: BTreeMap<Slot, Poly>,
    pub exception_set: BTreeSet<ExceptionCylinder>,
}

impl Decomposition {
    /// The part of a slot outside the exception set.
    pub fn kept(&self, tree: &TrajectoryTree, s: Slot) -> Kept {
        kept(tree, &self.exception_set, s)
    }

    /// `α` realized on arrival at `s` (zero when absent).
    pub fn alpha_at(&self, s: Slot) -> Poly {
        self.alpha.get(&s).cloned().unwrap_or_default()
    }

    /// `A_i` at a slot of date `i`.
    pub fn compensator(&self, tree: &TrajectoryTree, s: Slot) -> Poly {
        let mut a = Poly::zero();
        for i in 1..=tree.slot_time(s) {
            a = &a + &self.alpha_at(tree.slot_ancestor(s, i));
        }
        a
    }

    /// `f_0 + Σ_{j<i} H_j Δ_j S + Σ_{j<i} δ_j` at a slot of date `i`.
    pub fn martingale_part(&self, tree: &TrajectoryTree, s: Slot) -> Poly {
        let mut w = Poly::constant(self.base.clone());
        for j in 0..tree.slot_time(s) {
            let here = tree.slot_ancestor(s, j);
            let next = tree.slot_ancestor(s, j + 1);
            w = &w + &(&self.hedge.at(here) * &slot_increment(tree, next));
            w = &w + &Poly::constant(self.delta(j));
        }
        w
    }

    fn delta(&self, j: usize) -> Q {
        self.deltas.get(j).cloned().unwrap_or_default()
    }
}

fn kept(tree: &TrajectoryTree, ex: &BTreeSet<ExceptionCylinder>, s: Slot) -> Kept {
    let node_hit = |v: NodeId| tree.path(v).iter().any(|u| ex.contains(&ExceptionCylinder::Node(*u)));
    match s {
        Slot::Node(v) => {
            if node_hit(v) {
                Kept::None
            } else {
                Kept::All
            }
        }
        Slot::Family { family, .. } => {
            let fam = tree.family(family);
            if node_hit(fam.parent) {
                Kept::None
            } else if ex.contains(&ExceptionCylinder::NonzeroMembers(family)) {
                Kept::Members(fam.increment.zero_members(fam.n0))
            } else {
                Kept::All
            }
        }
    }
}

/// Whether `p ≥ 0` on the kept members of a slot.
fn nonneg_on(tree: &TrajectoryTree, s: Slot, k: &Kept, p: &Poly) -> bool {
    match (s, k) {
        (_, Kept::None) => true,
        (Slot::Node(_), _) => !p.coeff(0).is_negative(),
        (Slot::Family { family, .. }, Kept::All) => p.nonneg_on_members(tree.family(family).n0),
        (Slot::Family { .. }, Kept::Members(list)) => list.iter().all(|n| !p.at_member(*n).is_negative()),
    }
}

/// Whether `p = 0` on the kept members of a slot.
fn zero_on(s: Slot, k: &Kept, p: &Poly) -> bool {
    match (s, k) {
        (_, Kept::None) => true,
        (Slot::Node(_), _) => p.coeff(0).is_zero(),
        // A polynomial vanishing at infinitely many points is zero.
        (Slot::Family { .. }, Kept::All) => p.is_zero(),
        (Slot::Family { .. }, Kept::Members(list)) => list.iter().all(|n| p.at_member(*n).is_zero()),
    }
}

#[derive(Debug, Error)]
pub enum DecompositionError {
    #[error("not a supermartingale: {0}")]
    NotSupermartingale(String),
    #[error("property (L) does not hold almost everywhere: {}", .0.join("; "))]
    NotLae(Vec<String>),
    #[error("no finite hedge of cost ≤ {target} at node {node}")]
    NoFiniteHedge { node: String, target: Q },
    #[error("slacks: {0}")]
    BadDeltas(String),
    #[error("internal inconsistency: {0}")]
    Internal(String),
    #[error(transparent)]
    Pricing(#[from] PricingError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Result of [`check_supermartingale`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SupermartingaleReport {
    pub holds: bool,
    pub witness: Option<String>,
    /// Number of node and family-slot inequalities checked.
    pub checked: usize,
    /// Negligible nodes where no inequality is required.
    pub skipped: Vec<String>,
}

/// `σ̄_j f_{j+1} ≤ f_j` at every node and family slot off the null cover.
pub fn check_supermartingale(
    tree: &TrajectoryTree,
    report: &AnalysisReport,
    f: &ProcessSequence,
    cfg: &PricingConfig,
) -> Result<SupermartingaleReport, PricingError> {
    f.validate(tree)?;
    let mut out = SupermartingaleReport {
        holds: true,
        witness: None,
        checked: 0,
        skipped: Vec::new(),
    };
    let fail = |out: &mut SupermartingaleReport, w: String| {
        if out.holds {
            out.holds = false;
            out.witness = Some(w);
        }
    };
    for j in 0..tree.horizon() {
        for v in tree.nodes_at(j) {
            if report.negligible(tree, v) {
                out.skipped.push(tree.label(v).to_string());
                continue;
            }
            if report.l(v) == LStatus::Undecided {
                return Err(PricingError::Undecided {
                    nodes: vec![tree.label(v).to_string()],
                });
            }
            out.checked += 1;
            let s = sigma_bar(tree, report, &f.steps[j + 1], v, cfg)?.value;
            let fj = f.steps[j].at_node(tree, v);
            let within =
                s.hi <= ExtQ::Finite(fj.clone()) || (s.lo <= ExtQ::Finite(fj.clone()) && s.width() <= cfg.tolerance);
            if !within {
                fail(
                    &mut out,
                    format!(
                        "{} (date {j}): σ̄ f_{} = {} > f_{j} = {}",
                        tree.label(v),
                        j + 1,
                        s,
                        fmt_q(&fj)
                    ),
                );
            }
        }
        for fam in tree.families_at(j) {
            let s = Slot::Family { family: fam, time: j };
            let kept = match report.null_cover.uncovered_members(tree, fam) {
                crate::analysis::Members::All => Kept::All,
                crate::analysis::Members::Only(l) if l.is_empty() => Kept::None,
                crate::analysis::Members::Only(l) => Kept::Members(l),
            };
            if kept == Kept::None {
                continue;
            }
            out.checked += 1;
            let gap = &f.at(tree, j, s) - &f.at(tree, j + 1, s);
            if !nonneg_on(tree, s, &kept, &gap) {
                fail(
                    &mut out,
                    format!("{}: f_{} > f_{j} on some member", tree.describe_slot(s), j + 1),
                );
            }
        }
    }
    Ok(out)
}

/// One-step program of `f_{j+1}` at an explicit node of date `j`, dropping
/// children where (L) fails (their continuation value is `−∞`).
fn step_program(tree: &TrajectoryTree, report: &AnalysisReport, f: &ProcessSequence, v: NodeId) -> StepProgram {
    let j = tree.node(v).time;
    let mut prog = StepProgram::default();
    for c in tree.children(v) {
        match c {
            ChildRef::Node(u) => {
                if report.l(u) != LStatus::Fails {
                    let x = f.at(tree, j + 1, Slot::Node(u)).coeff(0);
                    prog.lines
                        .push((Constraint::Child(u), Line::new(tree.node(u).increment.clone(), x)));
                }
            }
            ChildRef::Family(fam) => {
                let s = Slot::Family {
                    family: fam,
                    time: j + 1,
                };
                let fm = tree.family(fam);
                prog.families.push(FamilyTerm {
                    family: fam,
                    increment: fm.increment.clone(),
                    cont: f.at(tree, j + 1, s),
                    n0: fm.n0,
                });
            }
        }
    }
    prog
}

/// The stopping time `τ#` as a set of topmost triggered cylinders.
pub fn exception_set(
    tree: &TrajectoryTree,
    report: &AnalysisReport,
    f: &ProcessSequence,
    cfg: &PricingConfig,
) -> Result<BTreeSet<ExceptionCylinder>, PricingError> {
    let mut ex = BTreeSet::new();
    for v in tree.nodes() {
        let node = tree.node(v);
        if let Some(p) = node.parent {
            if kept(tree, &ex, Slot::Node(p)) == Kept::None {
                continue;
            }
        }
        let k = node.time;
        let mut hit = match report.l(v) {
            LStatus::Fails => true,
            LStatus::Undecided => {
                return Err(PricingError::Undecided {
                    nodes: vec![tree.label(v).to_string()],
                });
            }
            LStatus::Holds => false,
        };
        if let Some(p) = node.parent {
            hit |= report.class(p) == NodeClass::ArbitrageTypeI && !node.increment.is_zero();
        }
        if !hit && k < tree.horizon() {
            let s = sigma_bar(tree, report, &f.steps[k + 1], v, cfg)?.value;
            hit = s.hi > ExtQ::Finite(f.steps[k].at_node(tree, v));
        }
        if hit {
            ex.insert(ExceptionCylinder::Node(v));
        }
    }
    for fam in tree.families() {
        let fm = tree.family(fam);
        if kept(tree, &ex, Slot::Node(fm.parent)) == Kept::None {
            continue;
        }
        if report.class(fm.parent) == NodeClass::ArbitrageTypeI
            && (fm.increment.has_positive_member(fm.n0) || fm.increment.has_negative_member(fm.n0))
        {
            ex.insert(ExceptionCylinder::NonzeroMembers(fam));
        }
    }
    Ok(ex)
}

/// Constructs a decomposition with slacks `deltas` (one per date `< T`).
pub fn doob_decompose(
    tree: &TrajectoryTree,
    report: &AnalysisReport,
    f: &ProcessSequence,
    deltas: &[Q],
    cfg: &PricingConfig,
) -> Result<Decomposition, DecompositionError> {
    f.validate(tree)?;
    if deltas.len() != tree.horizon() || deltas.iter().any(|d| !d.is_positive()) {
        return Err(DecompositionError::BadDeltas(format!(
            "need {} positive slacks, got {}",
            tree.horizon(),
            deltas.iter().map(fmt_q).collect::<Vec<_>>().join(",")
        )));
    }
    if !report.l_ae {
        return Err(DecompositionError::NotLae(report.l_ae_witness.clone()));
    }
    let sm = check_supermartingale(tree, report, f, cfg)?;
    if !sm.holds {
        return Err(DecompositionError::NotSupermartingale(sm.witness.unwrap_or_default()));
    }
    let ex = exception_set(tree, report, f, cfg)?;
    let mut hedge = HedgeSequence::new();
    for v in tree.nodes() {
        let j = tree.node(v).time;
        if j >= tree.horizon() || kept(tree, &ex, Slot::Node(v)) == Kept::None || report.class(v) != NodeClass::UpDown {
            continue;
        }
        let prog = step_program(tree, report, f, v);
        let target = &f.steps[j].at_node(tree, v) + &deltas[j];
        let sol = prog.solve(&cfg.step).ok();
        let h = match sol {
            Some(s) if s.attained && s.value.hi <= ExtQ::Finite(target.clone()) => s.hedge,
            _ => None,
        };
        let h = match h {
            Some(h) => h,
            None => match prog.feasible_hedge(&target, cfg.step.max_rounds) {
                Feasibility::Feasible { hedge, .. } => hedge,
                _ => {
                    return Err(DecompositionError::NoFiniteHedge {
                        node: tree.label(v).to_string(),
                        target,
                    });
                }
            },
        };
        if !h.is_zero() {
            hedge.explicit.insert(v, h);
        }
    }
    let base = f.steps[0].at_node(tree, tree.root());
    let mut d = Decomposition {
        base,
        deltas: deltas.to_vec(),
        hedge,
        alpha: BTreeMap::new(),
        exception_set: ex,
    };
    fill_alpha(tree, f, &mut d);
    for i in 1..=tree.horizon() {
        for s in tree.slots_at(i) {
            let k = d.kept(tree, s);
            if !nonneg_on(tree, s, &k, &d.alpha_at(s)) {
                return Err(DecompositionError::Internal(format!(
                    "negative compensator increment at {}",
                    tree.describe_slot(s)
                )));
            }
        }
    }
    Ok(d)
}

/// `α_j = δ_j + H_j Δ_j S − (f_{j+1} − f_j)` on every slot outside the
/// exception set (zero inside it).
fn fill_alpha(tree: &TrajectoryTree, f: &ProcessSequence, d: &mut Decomposition) {
    d.alpha.clear();
    for i in 1..=tree.horizon() {
        for s in tree.slots_at(i) {
            if d.kept(tree, s) == Kept::None {
                continue;
            }
            let p = tree.slot_ancestor(s, i - 1);
            let a = &(&Poly::constant(d.delta(i - 1)) + &(&d.hedge.at(p) * &slot_increment(tree, s)))
                - &(&f.at(tree, i, s) - &f.at(tree, i - 1, s));
            if !a.is_zero() {
                d.alpha.insert(s, a);
            }
        }
    }
}

/// A candidate decomposition with the given hedge and exception set, its
/// compensator increments read off the reconstruction identity (so only
/// their signs can fail verification).
pub fn candidate_decomposition(
    tree: &TrajectoryTree,
    f: &ProcessSequence,
    deltas: &[Q],
    hedge: HedgeSequence,
    exception_set: BTreeSet<ExceptionCylinder>,
) -> Decomposition {
    let base = f.steps[0].at_node(tree, tree.root());
    let mut d = Decomposition {
        base,
        deltas: deltas.to_vec(),
        hedge,
        alpha: BTreeMap::new(),
        exception_set,
    };
    fill_alpha(tree, f, &mut d);
    d
}

/// Result of [`verify_decomposition`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub valid: bool,
    pub witness: Option<String>,
    pub checked_slots: usize,
}

/// Checks a decomposition exactly: positive slacks, exception set inside the
/// null cover, `A` nondecreasing and the reconstruction identity off the
/// exception set, and `σ̄_j f_{j+1} ≤ f_j + δ_j` at every kept node.
pub fn verify_decomposition(
    tree: &TrajectoryTree,
    report: &AnalysisReport,
    f: &ProcessSequence,
    d: &Decomposition,
    cfg: &PricingConfig,
) -> Result<VerifyReport, PricingError> {
    f.validate(tree)?;
    let mut rep = VerifyReport {
        valid: true,
        witness: None,
        checked_slots: 0,
    };
    let fail = |rep: &mut VerifyReport, w: String| {
        if rep.valid {
            rep.valid = false;
            rep.witness = Some(w);
        }
    };
    if d.deltas.len() != tree.horizon() || d.deltas.iter().any(|x| !x.is_positive()) {
        fail(
            &mut rep,
            "slacks must be positive, one per date before the horizon".into(),
        );
    }
    for e in &d.exception_set {
        let null = match e {
            ExceptionCylinder::Node(v) => report.negligible(tree, *v),
            ExceptionCylinder::NonzeroMembers(fam) => {
                let parent = tree.family(*fam).parent;
                report
                    .null_cover
                    .arb_increment_cylinders
                    .contains(&(parent, ChildRef::Family(*fam)))
                    || report.negligible(tree, parent)
            }
        };
        if !null {
            let what = match e {
                ExceptionCylinder::Node(v) => tree.label(*v).to_string(),
                ExceptionCylinder::NonzeroMembers(fam) => format!("nonzero members of {}", tree.family(*fam).label),
            };
            fail(&mut rep, format!("exception cylinder {what} is not null"));
        }
    }
    if f.steps[0].at_node(tree, tree.root()) != d.base {
        fail(&mut rep, "base differs from f_0".into());
    }
    for i in 1..=tree.horizon() {
        for s in tree.slots_at(i) {
            let k = d.kept(tree, s);
            if k == Kept::None {
                continue;
            }
            rep.checked_slots += 1;
            if !nonneg_on(tree, s, &k, &d.alpha_at(s)) {
                fail(&mut rep, format!("compensator decreases at {}", tree.describe_slot(s)));
            }
            let rhs = &d.martingale_part(tree, s) - &d.compensator(tree, s);
            let gap = &f.at(tree, i, s) - &rhs;
            if !zero_on(s, &k, &gap) {
                fail(
                    &mut rep,
                    format!("reconstruction identity fails at {}", tree.describe_slot(s)),
                );
            }
        }
    }
    for v in tree.nodes() {
        let j = tree.node(v).time;
        if j >= tree.horizon() || d.kept(tree, Slot::Node(v)) == Kept::None || report.l(v) != LStatus::Holds {
            continue;
        }
        let s = sigma_bar(tree, report, &f.steps[j + 1], v, cfg)?.value;
        let bound = &f.steps[j].at_node(tree, v) + &d.delta(j);
        if s.lo > ExtQ::Finite(bound.clone()) {
            fail(
                &mut rep,
                format!(
                    "{}: σ̄ f_{} = {} > f_{j} + δ_{j} = {}",
                    tree.label(v),
                    j + 1,
                    s,
                    fmt_q(&bound)
                ),
            );
        }
    }
    Ok(rep)
}

/// Feasibility of `f_{j+1} ≤ f_j + δ + h Δ_j S` over the children of `v`
/// outside the null cover, with a single hedge `h`.
pub fn feasible_step(
    tree: &TrajectoryTree,
    report: &AnalysisReport,
    f: &ProcessSequence,
    v: NodeId,
    delta: &Q,
    cfg: &PricingConfig,
) -> Feasibility {
    let j = tree.node(v).time;
    let mut prog = StepProgram::default();
    for c in tree.children(v) {
        if report.null_cover.covers_child(tree, v, c) {
            continue;
        }
        match c {
            ChildRef::Node(u) => {
                let x = f.at(tree, j + 1, Slot::Node(u)).coeff(0);
                prog.lines
                    .push((Constraint::Child(u), Line::new(tree.node(u).increment.clone(), x)));
            }
            ChildRef::Family(fam) => {
                let s = Slot::Family {
                    family: fam,
                    time: j + 1,
                };
                let fm = tree.family(fam);
                let cont = f.at(tree, j + 1, s);
                match report.null_cover.uncovered_members(tree, fam) {
                    crate::analysis::Members::All => prog.families.push(FamilyTerm {
                        family: fam,
                        increment: fm.increment.clone(),
                        cont,
                        n0: fm.n0,
                    }),
                    crate::analysis::Members::Only(list) => {
                        for n in list {
                            prog.lines.push((
                                Constraint::Member { family: fam, n },
                                Line::new(fm.increment.at_member(n), cont.at_member(n)),
                            ));
                        }
                    }
                }
            }
        }
    }
    let target = &f.steps[j].at_node(tree, v) + delta;
    prog.feasible_hedge(&target, cfg.step.max_rounds)
}

/// Verdict of [`martingale_floor_check`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FloorStatus {
    Pass,
    Fail,
    Refused,
}

impl fmt::Display for FloorStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FloorStatus::Pass => "PASS",
            FloorStatus::Fail => "FAIL",
            FloorStatus::Refused => "REFUSED",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FloorReport {
    pub status: FloorStatus,
    /// `f_0 + Σ δ_j`.
    #[serde(serialize_with = "crate::num::ser_q")]
    pub floor: Q,
    /// First slot where `f_0 + Σ δ + Σ_{j<i} H_j Δ_j S < 0`, if any (evaluated
    /// even when the check is refused).
    pub breach: Option<String>,
    pub reason: Option<String>,
}

/// `f_0 + Σ_j δ_j + Σ_{j<i} H_j Δ_j S ≥ 0` on every trajectory and date,
/// family members included. Refused unless `f ≥ 0` and (H.1) holds.
pub fn martingale_floor_check(
    tree: &TrajectoryTree,
    report: &AnalysisReport,
    f: &ProcessSequence,
    d: &Decomposition,
) -> FloorReport {
    let total: Q = d.deltas.iter().fold(Q::zero(), |a, b| a + b);
    let floor = &d.base + &total;
    let mut breach = None;
    'outer: for i in 0..=tree.horizon() {
        for s in tree.slots_at(i) {
            let mut w = Poly::constant(floor.clone());
            for j in 0..i {
                w = &w + &(&d.hedge.at(tree.slot_ancestor(s, j)) * &slot_increment(tree, tree.slot_ancestor(s, j + 1)));
            }
            if !nonneg_on(tree, s, &Kept::All, &w) {
                breach = Some(format!("{} (date {i}): {}", tree.describe_slot(s), w.pretty()));
                break 'outer;
            }
        }
    }
    let reason = if !f.is_nonnegative(tree) {
        Some("the process takes negative values".to_string())
    } else if !report.hypotheses.h1.holds {
        Some(format!("(H.1) fails: {}", report.hypotheses.h1.witnesses.join("; ")))
    } else {
        None
    };
    let status = match (&reason, &breach) {
        (Some(_), _) => FloorStatus::Refused,
        (None, None) => FloorStatus::Pass,
        (None, Some(_)) => FloorStatus::Fail,
    };
    FloorReport {
        status,
        floor,
        breach,
        reason,
    }
}

/// Limits of a nonnegative supermartingale on a common-horizon tree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConvergenceReport {
    /// Limits exist and are finite on every trajectory off `n_div`.
    pub limits_exist: bool,
    /// `(terminal slot, lim f_i)`.
    pub limits: Vec<(String, String)>,
    /// The null cover, used as the divergence set.
    pub n_div: Vec<String>,
    /// Whether (L)-a.e., (H.1), nonnegativity and the supermartingale
    /// property all hold, i.e. whether the convergence theorem applies.
    pub hypotheses_hold: bool,
    pub notes: Vec<String>,
}

pub fn convergence_report(
    tree: &TrajectoryTree,
    report: &AnalysisReport,
    f: &ProcessSequence,
    cfg: &PricingConfig,
) -> Result<ConvergenceReport, PricingError> {
    let sm = check_supermartingale(tree, report, f, cfg)?;
    let mut notes = Vec::new();
    if !report.l_ae {
        notes.push("(L) does not hold almost everywhere".into());
    }
    if !report.hypotheses.h1.holds {
        notes.push("(H.1) fails".into());
    }
    if !f.is_nonnegative(tree) {
        notes.push("the process takes negative values".into());
    }
    if !sm.holds {
        notes.push(format!(
            "not a supermartingale: {}",
            sm.witness.clone().unwrap_or_default()
        ));
    }
    let hypotheses_hold = notes.is_empty();
    notes.push("every trajectory is constant from the horizon on, so f_i = f_T for i ≥ T and the limit is f_T".into());
    let t = tree.horizon();
    let limits = tree
        .slots_at(t)
        .into_iter()
        .map(|s| (tree.describe_slot(s), f.at(tree, t, s).pretty()))
        .collect();
    let cover = &report.null_cover;
    let mut n_div: Vec<String> = cover
        .type_ii_shadows
        .iter()
        .map(|v| format!("shadow {}", tree.label(*v)))
        .collect();
    n_div.extend(
        cover
            .arb_increment_cylinders
            .iter()
            .map(|(v, c)| format!("cylinder {} -> {}", tree.label(*v), tree.describe_child(*c))),
    );
    Ok(ConvergenceReport {
        limits_exist: true,
        limits,
        n_div,
        hypotheses_hold,
        notes,
    })
}

/// Text form: the payoff-style header `decomposition horizon=<T>` followed by
/// `base`, `delta`, `hedge`, `alpha`, `alpha-family` and `exception` lines.
pub fn write_decomposition(tree: &TrajectoryTree, d: &Decomposition) -> String {
    let mut out = format!("decomposition horizon={}\n", tree.horizon());
    out += &format!("base = {}\n", fmt_q(&d.base));
    for (j, x) in d.deltas.iter().enumerate() {
        out += &format!("delta {j} = {}\n", fmt_q(x));
    }
    for (v, h) in &d.hedge.explicit {
        out += &format!("hedge {} = {}\n", tree.label(*v), fmt_q(h));
    }
    for ((fam, time), p) in &d.hedge.family {
        out += &format!(
            "hedge-family {} {} poly={}\n",
            tree.family(*fam).label,
            time,
            p.to_list()
        );
    }
    for (s, a) in &d.alpha {
        match s {
            Slot::Node(v) => out += &format!("alpha {} = {}\n", tree.label(*v), fmt_q(&a.coeff(0))),
            Slot::Family { family, time } => {
                out += &format!(
                    "alpha-family {} {} poly={}\n",
                    tree.family(*family).label,
                    time,
                    a.to_list()
                )
            }
        }
    }
    for e in &d.exception_set {
        match e {
            ExceptionCylinder::Node(v) => out += &format!("exception node {}\n", tree.label(*v)),
            ExceptionCylinder::NonzeroMembers(f) => {
                out += &format!("exception nonzero-members {}\n", tree.family(*f).label)
            }
        }
    }
    out
}

/// Parses the text form written by [`write_decomposition`].
pub fn parse_decomposition(tree: &TrajectoryTree, text: &str) -> Result<Decomposition, ModelError> {
    let mut d = Decomposition {
        base: Q::zero(),
        deltas: Vec::new(),
        hedge: HedgeSequence::new(),
        alpha: BTreeMap::new(),
        exception_set: BTreeSet::new(),
    };
    let mut deltas: BTreeMap<usize, Q> = BTreeMap::new();
    let mut header = false;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |m: String| ModelError::Syntax {
            line: idx + 1,
            column: 1,
            message: m,
        };
        let toks: Vec<&str> = line.split_whitespace().collect();
        let rat = |t: Option<&&str>| -> Result<Q, ModelError> {
            let t = t.ok_or_else(|| err("missing value".into()))?;
            parse_q(t).map_err(err)
        };
        let poly = |t: Option<&&str>| -> Result<Poly, ModelError> {
            let t = t.ok_or_else(|| err("missing `poly=`".into()))?;
            let body = t
                .strip_prefix("poly=")
                .ok_or_else(|| err(format!("expected `poly=`, found `{t}`")))?;
            Poly::parse(body).map_err(err)
        };
        let node = |t: Option<&&str>| -> Result<NodeId, ModelError> {
            let t = t.ok_or_else(|| err("missing node".into()))?;
            tree.node_id(t).map_err(|_| err(format!("unknown node `{t}`")))
        };
        let family = |t: Option<&&str>| -> Result<FamilyId, ModelError> {
            let t = t.ok_or_else(|| err("missing family".into()))?;
            tree.family_id(t).map_err(|_| err(format!("unknown family `{t}`")))
        };
        let time = |t: Option<&&str>| -> Result<usize, ModelError> {
            let t = t.ok_or_else(|| err("missing date".into()))?;
            t.parse().map_err(|_| err(format!("bad date `{t}`")))
        };
        match toks[0] {
            "decomposition" => {
                let h = toks
                    .get(1)
                    .and_then(|t| t.strip_prefix("horizon="))
                    .ok_or_else(|| err("expected `horizon=`".into()))?;
                if h.parse::<usize>().ok() != Some(tree.horizon()) {
                    return Err(ModelError::HorizonMismatch(format!(
                        "document horizon {h}, tree {}",
                        tree.horizon()
                    )));
                }
                header = true;
            }
            "base" => d.base = rat(toks.get(2))?,
            "delta" => {
                deltas.insert(time(toks.get(1))?, rat(toks.get(3))?);
            }
            "hedge" => {
                d.hedge.explicit.insert(node(toks.get(1))?, rat(toks.get(3))?);
            }
            "hedge-family" => {
                d.hedge
                    .family
                    .insert((family(toks.get(1))?, time(toks.get(2))?), poly(toks.get(3))?);
            }
            "alpha" => {
                d.alpha
                    .insert(Slot::Node(node(toks.get(1))?), Poly::constant(rat(toks.get(3))?));
            }
            "alpha-family" => {
                let s = Slot::Family {
                    family: family(toks.get(1))?,
                    time: time(toks.get(2))?,
                };
                d.alpha.insert(s, poly(toks.get(3))?);
            }
            "exception" => match toks.get(1).copied() {
                Some("node") => {
                    d.exception_set.insert(ExceptionCylinder::Node(node(toks.get(2))?));
                }
                Some("nonzero-members") => {
                    d.exception_set
                        .insert(ExceptionCylinder::NonzeroMembers(family(toks.get(2))?));
                }
                other => return Err(err(format!("unknown exception kind `{}`", other.unwrap_or("")))),
            },
            other => return Err(err(format!("unknown directive `{other}`"))),
        }
    }
    if !header {
        return Err(ModelError::Syntax {
            line: 1,
            column: 1,
            message: "missing `decomposition` header".into(),
        });
    }
    d.deltas = deltas.into_values().collect();
    Ok(d)
}
