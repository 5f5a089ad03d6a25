//! Node classification, null covers, property (L) and its sufficient
//! hypotheses.
//!
//! Property (L) at a node is continuity from below of the superhedging
//! functional; on a finite-horizon tree it is decided here by a local
//! certificate evaluated from the leaves upward:
//!
//! * a horizon leaf holds (its trajectory is constant);
//! * a type II arbitrage node fails (unbounded harvesting is available);
//! * a flat or type I node holds iff one of its zero-increment children holds
//!   (hedging has no effect there, other moves are one-sided);
//! * an up-down node holds iff the increments of its holding children reach
//!   (or approach) `0` from above and from below. When that fails, the
//!   holding children all lie strictly on one side of `0`, bounded away from
//!   it, and a portfolio trading against that side covers `0` at arbitrarily
//!   negative cost because every non-holding child is itself covered at any
//!   cost.
//!
//! Family members continue constantly and therefore always hold. Leaves with
//! an unbounded-constancy tail are undecided; an undecided child only decides
//! its parent when the verdict is the same whichever way it is resolved.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::model::{ChildRef, FamilyId, NodeId, Slot, TrajectoryTree};
use crate::num::{fmt_q, Q};

/// One-step classification of a node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum NodeClass {
    UpDown,
    Flat,
    ArbitrageTypeI,
    ArbitrageTypeII,
}

impl NodeClass {
    pub fn is_arbitrage(self) -> bool {
        matches!(self, NodeClass::ArbitrageTypeI | NodeClass::ArbitrageTypeII)
    }
}

impl fmt::Display for NodeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NodeClass::UpDown => "up-down",
            NodeClass::Flat => "flat",
            NodeClass::ArbitrageTypeI => "arbitrage-I",
            NodeClass::ArbitrageTypeII => "arbitrage-II",
        })
    }
}

/// Verdict on property (L) at a node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum LStatus {
    Holds,
    Fails,
    Undecided,
}

impl fmt::Display for LStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LStatus::Holds => "holds",
            LStatus::Fails => "fails",
            LStatus::Undecided => "undecided",
        })
    }
}

/// Which members of a family are not covered by the null cover.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Members {
    All,
    Only(Vec<u64>),
}

/// Canonical null cover: arbitrage steps with nonzero increment and the full
/// subtrees of type II nodes.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct NullCover {
    /// `(node, child)` with the node an arbitrage node and the child's
    /// increment nonzero; a family entry covers its nonzero members only.
    pub arb_increment_cylinders: BTreeSet<(NodeId, ChildRef)>,
    /// Type II nodes; each covers its whole subtree.
    pub type_ii_shadows: BTreeSet<NodeId>,
}

impl NullCover {
    /// Whether every trajectory through `v` is covered by a cylinder or shadow
    /// at or above `v`.
    pub fn covers_node(&self, tree: &TrajectoryTree, v: NodeId) -> bool {
        let path = tree.path(v);
        path.iter().any(|u| self.type_ii_shadows.contains(u))
            || path
                .windows(2)
                .any(|w| self.arb_increment_cylinders.contains(&(w[0], ChildRef::Node(w[1]))))
    }

    /// Members of a family whose trajectories are not covered.
    pub fn uncovered_members(&self, tree: &TrajectoryTree, f: FamilyId) -> Members {
        let fam = tree.family(f);
        if self.covers_node(tree, fam.parent) {
            Members::Only(Vec::new())
        } else if self
            .arb_increment_cylinders
            .contains(&(fam.parent, ChildRef::Family(f)))
        {
            Members::Only(fam.increment.zero_members(fam.n0))
        } else {
            Members::All
        }
    }

    /// Whether every trajectory through the child `c` of `v` is covered.
    pub fn covers_child(&self, tree: &TrajectoryTree, v: NodeId, c: ChildRef) -> bool {
        self.covers_node(tree, v)
            || match c {
                ChildRef::Node(u) => self.covers_node(tree, u),
                ChildRef::Family(f) => self.uncovered_members(tree, f) == Members::Only(Vec::new()),
            }
    }

    /// Whether every trajectory through the slot is covered.
    pub fn covers_slot(&self, tree: &TrajectoryTree, s: Slot) -> bool {
        match s {
            Slot::Node(v) => self.covers_node(tree, v),
            Slot::Family { family, .. } => self.uncovered_members(tree, family) == Members::Only(Vec::new()),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.arb_increment_cylinders.is_empty() && self.type_ii_shadows.is_empty()
    }
}

/// Verdict and witnesses for one hypothesis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HypothesisVerdict {
    pub name: String,
    pub holds: bool,
    /// True when no node triggers the hypothesis.
    pub vacuous: bool,
    /// Counterexamples when failing, supporting witnesses when holding.
    pub witnesses: Vec<String>,
    pub note: String,
}

/// All hypothesis verdicts for one tree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Hypotheses {
    pub h1: HypothesisVerdict,
    pub h2: HypothesisVerdict,
    pub h3: HypothesisVerdict,
    pub h4: HypothesisVerdict,
    pub h5: HypothesisVerdict,
}

/// Per-node analysis summary.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NodeReport {
    pub id: NodeId,
    pub label: String,
    pub time: usize,
    #[serde(serialize_with = "crate::num::ser_q")]
    pub value: Q,
    pub class: NodeClass,
    pub l_status: LStatus,
    pub l_basis: String,
    pub good: bool,
}

/// Full analysis of a tree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AnalysisReport {
    pub nodes: Vec<NodeReport>,
    pub null_cover: NullCover,
    pub hypotheses: Hypotheses,
    /// (L) holds at the root and every trajectory through a failing (or
    /// undecided) node lies in the null cover.
    pub l_ae: bool,
    /// Failing or undecided nodes, each with the reason it is negligible or
    /// the statement that it is not certified.
    pub l_ae_witness: Vec<String>,
    pub complete: bool,
}

impl AnalysisReport {
    pub fn class(&self, v: NodeId) -> NodeClass {
        self.nodes[v.0].class
    }

    pub fn l(&self, v: NodeId) -> LStatus {
        self.nodes[v.0].l_status
    }

    pub fn is_good(&self, v: NodeId) -> bool {
        self.nodes[v.0].good
    }

    /// All trajectories through `v` are covered: by a cylinder or shadow at or
    /// above `v`, or (for bad nodes) by arbitrage steps below it.
    pub fn negligible(&self, tree: &TrajectoryTree, v: NodeId) -> bool {
        self.null_cover.covers_node(tree, v) || !self.nodes[v.0].good
    }

    /// Like [`NullCover::covers_child`], extended to bad children.
    pub fn child_negligible(&self, tree: &TrajectoryTree, v: NodeId, c: ChildRef) -> bool {
        self.null_cover.covers_child(tree, v, c) || matches!(c, ChildRef::Node(u) if !self.nodes[u.0].good)
    }

    pub fn slot_negligible(&self, tree: &TrajectoryTree, s: Slot) -> bool {
        match s {
            Slot::Node(v) => self.negligible(tree, v),
            Slot::Family { .. } => self.null_cover.covers_slot(tree, s),
        }
    }

    /// Nodes whose (L) verdict is undecided.
    pub fn undecided(&self) -> Vec<NodeId> {
        self.nodes
            .iter()
            .filter(|n| n.l_status == LStatus::Undecided)
            .map(|n| n.id)
            .collect()
    }
}

fn signs(tree: &TrajectoryTree, v: NodeId) -> (bool, bool, bool) {
    let mut pos = false;
    let mut neg = false;
    let mut zero = false;
    for c in tree.children(v) {
        let s = tree.child_signs(c);
        pos |= s.positive;
        neg |= s.negative;
        zero |= s.zero;
    }
    if let Some(j) = &tree.node(v).recurrence {
        zero = true;
        pos |= j.is_positive();
        neg |= j.is_negative();
    }
    (pos, neg, zero)
}

/// Classification of one node (leaves without a tail are flat).
pub fn classify_node(tree: &TrajectoryTree, v: NodeId) -> NodeClass {
    let (pos, neg, zero) = signs(tree, v);
    if tree.is_leaf(v) && tree.node(v).recurrence.is_none() {
        return NodeClass::Flat;
    }
    match (pos, neg) {
        (true, true) => NodeClass::UpDown,
        (false, false) => NodeClass::Flat,
        _ if zero => NodeClass::ArbitrageTypeI,
        _ => NodeClass::ArbitrageTypeII,
    }
}

pub fn classify(tree: &TrajectoryTree) -> Vec<NodeClass> {
    tree.nodes().map(|v| classify_node(tree, v)).collect()
}

/// Canonical null cover.
pub fn null_cover(tree: &TrajectoryTree) -> NullCover {
    let classes = classify(tree);
    let mut cover = NullCover::default();
    for v in tree.nodes() {
        let class = classes[v.0];
        if class == NodeClass::ArbitrageTypeII {
            cover.type_ii_shadows.insert(v);
        }
        if class.is_arbitrage() {
            for c in tree.children(v) {
                let s = tree.child_signs(c);
                if s.positive || s.negative {
                    cover.arb_increment_cylinders.insert((v, c));
                }
            }
        }
    }
    cover
}

/// Whether the increments of the given children reach or approach `0` from
/// above (`sup ≥ 0`) and from below (`inf ≤ 0`).
fn straddles_zero(tree: &TrajectoryTree, children: &[ChildRef]) -> (bool, bool) {
    let mut up = false;
    let mut down = false;
    for &c in children {
        match c {
            ChildRef::Node(u) => {
                let x = &tree.node(u).increment;
                up |= !x.is_negative();
                down |= !x.is_positive();
            }
            ChildRef::Family(f) => {
                let fam = tree.family(f);
                up |= !fam.increment.sup_members(fam.n0).value.is_negative();
                down |= !fam.increment.inf_members(fam.n0).value.is_positive();
            }
        }
    }
    (up, down)
}

fn is_zero_child(tree: &TrajectoryTree, c: ChildRef) -> bool {
    tree.child_signs(c).zero
}

/// Decides (L) at every node, with a one-line justification per node.
pub fn l_status_with_basis(tree: &TrajectoryTree) -> Vec<(LStatus, String)> {
    let classes = classify(tree);
    let mut out: Vec<(LStatus, String)> = vec![(LStatus::Undecided, String::new()); tree.num_nodes()];
    for v in tree.nodes().collect::<Vec<_>>().into_iter().rev() {
        let node = tree.node(v);
        let status_of = |c: ChildRef| match c {
            ChildRef::Node(u) => out[u.0].0,
            ChildRef::Family(_) => LStatus::Holds,
        };
        let children = tree.children(v);
        let verdict = if node.recurrence.is_some() {
            (
                LStatus::Undecided,
                "unbounded-constancy tail: the set is not trajectorially complete".to_string(),
            )
        } else if tree.is_leaf(v) {
            (LStatus::Holds, "constant continuation".to_string())
        } else {
            match classes[v.0] {
                NodeClass::ArbitrageTypeII => (
                    LStatus::Fails,
                    "type II arbitrage node: one-sided moves bounded away from 0 are harvested".into(),
                ),
                NodeClass::Flat | NodeClass::ArbitrageTypeI => {
                    let zeros: Vec<ChildRef> = children.iter().copied().filter(|c| is_zero_child(tree, *c)).collect();
                    let st: Vec<LStatus> = zeros.iter().map(|c| status_of(*c)).collect();
                    if st.contains(&LStatus::Holds) {
                        (LStatus::Holds, "a zero-increment child holds".into())
                    } else if st.contains(&LStatus::Undecided) {
                        (LStatus::Undecided, "zero-increment child undecided".into())
                    } else {
                        (LStatus::Fails, "every zero-increment child fails".into())
                    }
                }
                NodeClass::UpDown => {
                    let holding: Vec<ChildRef> = children
                        .iter()
                        .copied()
                        .filter(|c| status_of(*c) == LStatus::Holds)
                        .collect();
                    let possible: Vec<ChildRef> = children
                        .iter()
                        .copied()
                        .filter(|c| status_of(*c) != LStatus::Fails)
                        .collect();
                    let (up, down) = straddles_zero(tree, &holding);
                    let (pup, pdown) = straddles_zero(tree, &possible);
                    if up && down {
                        (LStatus::Holds, "holding children reach 0 from both sides".into())
                    } else if !(pup && pdown) {
                        let side = if possible.is_empty() {
                            "no child holds".to_string()
                        } else if pup {
                            "holding children all move strictly up".to_string()
                        } else {
                            "holding children all move strictly down".to_string()
                        };
                        (LStatus::Fails, format!("{side}; failing children absorb any loss"))
                    } else {
                        (LStatus::Undecided, "depends on undecided children".into())
                    }
                }
            }
        };
        out[v.0] = verdict;
    }
    out
}

/// Property (L) per node.
pub fn l_status(tree: &TrajectoryTree) -> Vec<LStatus> {
    l_status_with_basis(tree).into_iter().map(|x| x.0).collect()
}

/// Good nodes by backward reachability: a node is good iff some trajectory
/// through it avoids every arbitrage step with nonzero increment.
pub fn good_nodes(tree: &TrajectoryTree) -> Vec<bool> {
    let classes = classify(tree);
    let mut good = vec![false; tree.num_nodes()];
    for v in tree.nodes().collect::<Vec<_>>().into_iter().rev() {
        let node = tree.node(v);
        let child_good = |c: ChildRef| match c {
            ChildRef::Node(u) => good[u.0],
            ChildRef::Family(_) => true,
        };
        good[v.0] = if node.recurrence.is_some() {
            // Every trajectory eventually jumps at an arbitrage node.
            false
        } else if tree.is_leaf(v) {
            true
        } else {
            match classes[v.0] {
                NodeClass::ArbitrageTypeII => false,
                NodeClass::UpDown => tree.children(v).into_iter().any(child_good),
                NodeClass::Flat | NodeClass::ArbitrageTypeI => tree
                    .children(v)
                    .into_iter()
                    .any(|c| is_zero_child(tree, c) && child_good(c)),
            }
        };
    }
    good
}

/// Good nodes by enumerating trajectories (families sampled by their first
/// members and every zero-increment member).
pub fn good_nodes_by_paths(tree: &TrajectoryTree) -> Vec<bool> {
    let classes = classify(tree);
    let arb_step = |parent: NodeId, nonzero: bool| nonzero && classes[parent.0].is_arbitrage();
    tree.nodes()
        .map(|v| {
            tree.endpoints(v, 3).into_iter().any(|e| {
                let (path, last) = match e {
                    crate::model::Endpoint::Leaf(u) => (tree.path(u), None),
                    crate::model::Endpoint::Member { family, n } => {
                        let fam = tree.family(family);
                        (
                            tree.path(fam.parent),
                            Some((fam.parent, !fam.increment.at_member(n).is_zero())),
                        )
                    }
                };
                let start = tree.node(v).time;
                let explicit_ok = path
                    .windows(2)
                    .all(|w| tree.node(w[0]).time < start || !arb_step(w[0], !tree.node(w[1]).increment.is_zero()));
                let member_ok = last.is_none_or(|(p, nz)| tree.node(p).time < start || !arb_step(p, nz));
                let tail_ok = match e {
                    crate::model::Endpoint::Leaf(u) => tree.node(u).recurrence.is_none(),
                    _ => true,
                };
                explicit_ok && member_ok && tail_ok
            })
        })
        .collect()
}

fn verdict(name: &str, bad: Vec<String>, good: Vec<String>, triggered: bool, note: &str) -> HypothesisVerdict {
    let holds = bad.is_empty();
    HypothesisVerdict {
        name: name.to_string(),
        holds,
        vacuous: !triggered,
        witnesses: if holds { good } else { bad },
        note: note.to_string(),
    }
}

/// Whether some child among `children` has increment `≥ x` (attained).
fn exists_ge(tree: &TrajectoryTree, children: &[ChildRef], x: &Q, strict: bool) -> Option<String> {
    children.iter().find_map(|&c| match c {
        ChildRef::Node(u) => {
            let d = &tree.node(u).increment;
            (if strict { d > x } else { d >= x }).then(|| tree.label(u).to_string())
        }
        ChildRef::Family(f) => {
            let fam = tree.family(f);
            let ok = if strict {
                fam.increment.exists_member_gt(x, fam.n0)
            } else {
                fam.increment.exists_member_ge(x, fam.n0)
            };
            ok.then(|| format!("family {}", fam.label))
        }
    })
}

fn exists_le(tree: &TrajectoryTree, children: &[ChildRef], x: &Q, strict: bool) -> Option<String> {
    children.iter().find_map(|&c| match c {
        ChildRef::Node(u) => {
            let d = &tree.node(u).increment;
            (if strict { d < x } else { d <= x }).then(|| tree.label(u).to_string())
        }
        ChildRef::Family(f) => {
            let fam = tree.family(f);
            let neg = -&fam.increment;
            let nx = -x;
            let ok = if strict {
                neg.exists_member_gt(&nx, fam.n0)
            } else {
                neg.exists_member_ge(&nx, fam.n0)
            };
            ok.then(|| format!("family {}", fam.label))
        }
    })
}

/// (H.1): at every up-down node where (L) holds and a child fails, children
/// with (weakly) higher and lower prices exist at which (L) holds.
pub fn check_h1(tree: &TrajectoryTree, classes: &[NodeClass], l: &[LStatus]) -> HypothesisVerdict {
    let mut bad = Vec::new();
    let mut good = Vec::new();
    let mut triggered = false;
    for v in tree.nodes() {
        if classes[v.0] != NodeClass::UpDown || l[v.0] != LStatus::Holds {
            continue;
        }
        let children = tree.children(v);
        let holding: Vec<ChildRef> = children
            .iter()
            .copied()
            .filter(|c| match c {
                ChildRef::Node(u) => l[u.0] == LStatus::Holds,
                ChildRef::Family(_) => true,
            })
            .collect();
        for c in &children {
            let ChildRef::Node(u) = *c else { continue };
            if l[u.0] != LStatus::Fails {
                continue;
            }
            triggered = true;
            let x = &tree.node(u).increment;
            match (exists_ge(tree, &holding, x, false), exists_le(tree, &holding, x, false)) {
                (Some(a), Some(b)) => good.push(format!(
                    "{} -> {}: {} above, {} below",
                    tree.label(v),
                    tree.label(u),
                    a,
                    b
                )),
                (a, b) => bad.push(format!(
                    "{} -> {}: no holding child {}",
                    tree.label(v),
                    tree.label(u),
                    if a.is_none() && b.is_none() {
                        "on either side".to_string()
                    } else if a.is_none() {
                        format!("with increment >= {}", fmt_q(x))
                    } else {
                        format!("with increment <= {}", fmt_q(x))
                    }
                )),
            }
        }
    }
    verdict(
        "H.1",
        bad,
        good,
        triggered,
        "siblings compared on holding children, ties allowed",
    )
}

/// (H.2) and (H.3) for every type II node.
pub fn check_h2_h3(tree: &TrajectoryTree, classes: &[NodeClass]) -> (HypothesisVerdict, HypothesisVerdict) {
    let (mut bad2, mut good2, mut bad3, mut good3) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    let mut triggered = false;
    for v in tree.nodes() {
        if classes[v.0] != NodeClass::ArbitrageTypeII {
            continue;
        }
        triggered = true;
        let label = tree.label(v).to_string();
        let Some(p) = tree.node(v).parent else {
            bad2.push(format!("{label}: type II at time 0"));
            bad3.push(format!("{label}: type II at time 0"));
            continue;
        };
        if classes[p.0] != NodeClass::UpDown {
            bad2.push(format!("{label}: parent {} is not up-down", tree.label(p)));
            bad3.push(format!("{label}: parent {} is not up-down", tree.label(p)));
            continue;
        }
        let siblings: Vec<ChildRef> = tree
            .children(p)
            .into_iter()
            .filter(|c| match c {
                ChildRef::Node(u) => classes[u.0] != NodeClass::ArbitrageTypeII,
                ChildRef::Family(_) => true,
            })
            .collect();
        let (up, down) = straddles_zero(tree, &siblings);
        if up && down {
            good2.push(format!("{label}: non-type-II siblings approach 0 from both sides"));
        } else {
            bad2.push(format!(
                "{label}: non-type-II siblings do not approach 0 from {}",
                if up { "below" } else { "above" }
            ));
        }
        let x = &tree.node(v).increment;
        match (exists_ge(tree, &siblings, x, true), exists_le(tree, &siblings, x, true)) {
            (Some(a), Some(b)) => good3.push(format!("{label}: straddled by {a} and {b}")),
            (a, _) => bad3.push(format!(
                "{label}: no non-type-II sibling strictly {} {}",
                if a.is_none() { "above" } else { "below" },
                fmt_q(x)
            )),
        }
    }
    (
        verdict(
            "H.2",
            bad2,
            good2,
            triggered,
            "limits of family increments count as approaching",
        ),
        verdict(
            "H.3",
            bad3,
            good3,
            triggered,
            "strict straddling by attained sibling prices",
        ),
    )
}

/// (H.4): every good up-down node has good children approaching 0 from both
/// sides.
pub fn check_h4(tree: &TrajectoryTree, classes: &[NodeClass], good: &[bool]) -> HypothesisVerdict {
    let mut bad = Vec::new();
    let mut ok = Vec::new();
    let mut triggered = false;
    for v in tree.nodes() {
        if classes[v.0] != NodeClass::UpDown || !good[v.0] {
            continue;
        }
        triggered = true;
        let g: Vec<ChildRef> = tree
            .children(v)
            .into_iter()
            .filter(|c| match c {
                ChildRef::Node(u) => good[u.0],
                ChildRef::Family(_) => true,
            })
            .collect();
        let (up, down) = straddles_zero(tree, &g);
        if up && down {
            ok.push(tree.label(v).to_string());
        } else {
            bad.push(format!(
                "{}: good children do not approach 0 from {}",
                tree.label(v),
                if up { "below" } else { "above" }
            ));
        }
    }
    verdict("H.4", bad, ok, triggered, "checked at good up-down nodes")
}

/// (H.5): diagonal limits through good nodes stay in the set.
pub fn check_h5(tree: &TrajectoryTree) -> HypothesisVerdict {
    let note = if tree.is_complete() {
        "holds by construction: every trajectory is constant after the common horizon, so a \
         diagonal sequence stabilizes and its limit is one of the trajectories"
    } else {
        "holds: the only missing diagonal limits stay forever at nodes with an \
         unbounded-constancy tail, and those nodes are bad"
    };
    verdict("H.5", Vec::new(), Vec::new(), true, note)
}

/// Runs the complete analysis.
pub fn analyze(tree: &TrajectoryTree) -> AnalysisReport {
    let classes = classify(tree);
    let lb = l_status_with_basis(tree);
    let l: Vec<LStatus> = lb.iter().map(|x| x.0).collect();
    let good = good_nodes(tree);
    let cover = null_cover(tree);
    let (h2, h3) = check_h2_h3(tree, &classes);
    let hypotheses = Hypotheses {
        h1: check_h1(tree, &classes, &l),
        h2,
        h3,
        h4: check_h4(tree, &classes, &good),
        h5: check_h5(tree),
    };
    let mut witness = Vec::new();
    let mut l_ae = l[0] == LStatus::Holds;
    if !l_ae {
        witness.push(format!("root: (L) {}", l[0]));
    }
    for v in tree.nodes() {
        if l[v.0] == LStatus::Holds {
            continue;
        }
        // Only the topmost failing node on each path matters.
        if tree.path(v).iter().rev().skip(1).any(|u| l[u.0] != LStatus::Holds) {
            continue;
        }
        let label = tree.label(v);
        if cover.covers_node(tree, v) {
            witness.push(format!("{label}: (L) {} inside the null cover", l[v.0]));
        } else if !good[v.0] {
            witness.push(format!(
                "{label}: (L) {}, bad node: every trajectory takes a nonzero arbitrage step",
                l[v.0]
            ));
        } else {
            l_ae = false;
            witness.push(format!("{label}: (L) {} at a good node outside the null cover", l[v.0]));
        }
    }
    let nodes = tree
        .nodes()
        .map(|v| NodeReport {
            id: v,
            label: tree.label(v).to_string(),
            time: tree.node(v).time,
            value: tree.node(v).value.clone(),
            class: classes[v.0],
            l_status: l[v.0],
            l_basis: lb[v.0].1.clone(),
            good: good[v.0],
        })
        .collect();
    AnalysisReport {
        nodes,
        null_cover: cover,
        hypotheses,
        l_ae,
        l_ae_witness: witness,
        complete: tree.is_complete(),
    }
}
