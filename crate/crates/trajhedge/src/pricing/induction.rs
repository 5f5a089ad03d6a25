//! Backward induction of the one-step kernel and certificate checking.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::analysis::{AnalysisReport, LStatus, NodeClass};
use crate::model::{wealth, ChildRef, HedgeSequence, NodeId, PayoffSpec, SimpleStrategy, Slot, TrajectoryTree};
use crate::num::{ExtQ, Q};
use crate::poly::Poly;
use crate::pricing::onestep::{Bounds, Constraint, FamilyTerm, StepProgram};
use crate::pricing::{PricingConfig, PricingError};
use crate::pwl::{Direction, Line};

/// Which functional is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Operator {
    /// The conditional outer integral `σ̄`.
    SigmaBar,
    /// The nonnegative-wealth functional `Ī`.
    IBar,
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Operator::SigmaBar => "sigma",
            Operator::IBar => "ibar",
        })
    }
}

/// A price with its certificate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PriceResult {
    pub operator: Operator,
    pub node: NodeId,
    pub value: Bounds,
    /// Whether an optimal hedge exists at every step of the induction.
    pub attained: bool,
    /// A strategy started at the node's date whose wealth dominates the
    /// payoff on every non-waived trajectory (and stays nonnegative for `Ī`)
    /// when started with `certificate_capital`.
    pub hedge: Option<SimpleStrategy>,
    pub certificate_capital: Option<Q>,
    /// Constraints tight at the node's own step.
    pub active_set: Vec<String>,
    /// Escape direction of near-optimal hedges at the node when not attained.
    pub drift: Option<Direction>,
    /// Children whose domination requirement was waived.
    pub waived: Vec<String>,
    /// `Ī` on trees with families is the single aggregated strategy value.
    pub model_value: bool,
    pub rounds: usize,
}

impl PriceResult {
    /// The exact value, when the bounds coincide.
    pub fn exact(&self) -> Option<&ExtQ> {
        self.value.value()
    }
}

#[derive(Clone, Debug)]
struct NodeOut {
    value: Bounds,
    attained: bool,
    hedge: Option<Q>,
    drift: Option<Direction>,
    active: Vec<Constraint>,
    terminal: bool,
    minus_inf: bool,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    Lo,
    Hi,
}

/// Which trajectories below a child are kept.
enum Scope {
    All,
    Members(Vec<u64>),
    Waived,
}

struct Engine<'a> {
    tree: &'a TrajectoryTree,
    report: &'a AnalysisReport,
    cfg: &'a PricingConfig,
    op: Operator,
    payoff: &'a PayoffSpec,
    end: usize,
    memo: BTreeMap<NodeId, NodeOut>,
    undecided: BTreeSet<NodeId>,
    waived: BTreeSet<String>,
    rounds: usize,
}

impl<'a> Engine<'a> {
    fn nonneg(&self) -> bool {
        self.op == Operator::IBar && self.cfg.nonnegativity
    }

    fn scope(&self, v: NodeId, c: ChildRef) -> Scope {
        if !self.cfg.waivers {
            return Scope::All;
        }
        if self.report.class(v) == NodeClass::ArbitrageTypeII {
            return Scope::Waived;
        }
        if self.report.null_cover.arb_increment_cylinders.contains(&(v, c)) {
            return match c {
                ChildRef::Node(_) => Scope::Waived,
                ChildRef::Family(f) => {
                    let fam = self.tree.family(f);
                    Scope::Members(fam.increment.zero_members(fam.n0))
                }
            };
        }
        Scope::All
    }

    fn l_fails(&self, v: NodeId) -> bool {
        self.op == Operator::SigmaBar && self.cfg.waivers && self.report.l(v) == LStatus::Fails
    }

    fn is_terminal(&self, v: NodeId) -> bool {
        self.tree.node(v).time >= self.end || self.tree.is_leaf(v)
    }

    fn terminal_value(&self, v: NodeId) -> Q {
        self.payoff.at_node(self.tree, v)
    }

    fn family_cont(&self, f: crate::model::FamilyId) -> Poly {
        self.payoff.at_slot(
            self.tree,
            Slot::Family {
                family: f,
                time: self.end,
            },
        )
    }

    fn value(&mut self, v: NodeId) -> Result<Bounds, PricingError> {
        if let Some(o) = self.memo.get(&v) {
            return Ok(o.value.clone());
        }
        let out = self.compute(v)?;
        let value = out.value.clone();
        self.memo.insert(v, out);
        Ok(value)
    }

    fn compute(&mut self, v: NodeId) -> Result<NodeOut, PricingError> {
        let leaf = |value: Bounds, minus_inf: bool| NodeOut {
            value,
            attained: true,
            hedge: None,
            drift: None,
            active: Vec::new(),
            terminal: true,
            minus_inf,
        };
        if self.op == Operator::SigmaBar && self.cfg.waivers && self.report.l(v) == LStatus::Undecided {
            self.undecided.insert(v);
            return Ok(leaf(Bounds::neg_inf(), true));
        }
        if self.l_fails(v) {
            return Ok(leaf(Bounds::neg_inf(), true));
        }
        if self.is_terminal(v) {
            return Ok(leaf(Bounds::finite(self.terminal_value(v)), false));
        }
        for c in self.tree.children(v) {
            if let (ChildRef::Node(u), Scope::All) = (c, self.scope(v, c)) {
                self.value(u)?;
            }
        }
        let lo = self.program(v, Side::Lo, None);
        let hi = self.program(v, Side::Hi, None);
        let context = || self.tree.label(v).to_string();
        let unconverged = |e: crate::pricing::onestep::Unconverged| PricingError::Unconverged {
            context: context(),
            lo: e.lo,
            hi: e.hi.to_string(),
            rounds: e.rounds,
        };
        let s_hi = hi.solve(&self.cfg.step).map_err(unconverged)?;
        let s_lo = if lo == hi {
            s_hi.clone()
        } else {
            lo.solve(&self.cfg.step).map_err(unconverged)?
        };
        self.rounds += s_hi.rounds;
        let mut out = NodeOut {
            value: Bounds {
                lo: s_lo.value.lo.clone(),
                hi: s_hi.value.hi.clone(),
            },
            attained: s_hi.attained && s_lo.attained,
            hedge: s_hi.hedge.clone(),
            drift: s_hi.drift,
            active: s_hi.active.clone(),
            terminal: false,
            minus_inf: false,
        };
        if self.nonneg() {
            let zero = ExtQ::zero();
            if out.value.hi < zero {
                // Capital 0 suffices: any hedge with envelope ≤ 0 works.
                let ok = out.hedge.as_ref().is_some_and(|h| hi.envelope(h) <= zero);
                if !ok {
                    out.hedge = hi.feasible_hedge(&Q::zero(), self.cfg.step.max_rounds).hedge().cloned();
                }
                out.attained = out.hedge.is_some();
                out.drift = None;
                out.active = Vec::new();
            }
            out.value = out.value.max_with(&Q::zero());
        }
        Ok(out)
    }

    /// The one-step program at `v`, with child values read from the memo
    /// (`caps = None`) or from fixed-hedge capital requirements.
    fn program(&mut self, v: NodeId, side: Side, caps: Option<&BTreeMap<NodeId, ExtQ>>) -> StepProgram {
        let mut prog = StepProgram::default();
        let nonneg = self.nonneg();
        for c in self.tree.children(v) {
            let scope = self.scope(v, c);
            match c {
                ChildRef::Node(u) => {
                    let delta = self.tree.node(u).increment.clone();
                    if let Scope::Waived = scope {
                        self.waived.insert(self.tree.label(u).to_string());
                        if nonneg {
                            prog.lines.push((Constraint::Child(u), Line::new(delta, Q::zero())));
                        }
                        continue;
                    }
                    let x = match caps {
                        Some(m) => m[&u].clone(),
                        None => {
                            let b = &self.memo[&u].value;
                            match side {
                                Side::Lo => b.lo.clone(),
                                Side::Hi => b.hi.clone(),
                            }
                        }
                    };
                    match x {
                        ExtQ::Finite(x) => prog.lines.push((Constraint::Child(u), Line::new(delta, x))),
                        // A `−∞` continuation imposes nothing.
                        _ => {
                            self.waived.insert(format!("{} (-inf)", self.tree.label(u)));
                        }
                    }
                }
                ChildRef::Family(f) => {
                    let fam = self.tree.family(f);
                    let cont = self.family_cont(f);
                    let term = |cont: Poly| FamilyTerm {
                        family: f,
                        increment: fam.increment.clone(),
                        cont,
                        n0: fam.n0,
                    };
                    match scope {
                        Scope::All => prog.families.push(term(cont)),
                        Scope::Members(list) => {
                            self.waived.insert(format!("family {} (nonzero members)", fam.label));
                            if nonneg {
                                prog.families.push(term(Poly::zero()));
                            }
                            for n in list {
                                prog.lines.push((
                                    Constraint::Member { family: f, n },
                                    Line::new(fam.increment.at_member(n), cont.at_member(n)),
                                ));
                            }
                        }
                        Scope::Waived => {
                            self.waived.insert(format!("family {}", fam.label));
                            if nonneg {
                                prog.families.push(term(Poly::zero()));
                            }
                        }
                    }
                }
            }
        }
        prog
    }

    /// Capital needed by the fixed hedges, from the leaves up.
    fn certificate(&mut self, node: NodeId) -> Option<(Q, HedgeSequence)> {
        let visited: Vec<NodeId> = self.memo.keys().rev().copied().collect();
        let mut caps: BTreeMap<NodeId, ExtQ> = BTreeMap::new();
        let mut hedge = HedgeSequence::new();
        for v in visited {
            let out = self.memo[&v].clone();
            let cap = if out.minus_inf {
                ExtQ::NegInf
            } else if out.terminal {
                ExtQ::Finite(self.terminal_value(v))
            } else if out.value.hi.is_neg_inf() {
                ExtQ::NegInf
            } else {
                let h = out.hedge.clone()?;
                let prog = self.program(v, Side::Hi, Some(&caps));
                let mut c = prog.envelope(&h);
                if self.nonneg() {
                    c = c.max(ExtQ::zero());
                }
                if !h.is_zero() {
                    hedge.explicit.insert(v, h);
                }
                c
            };
            caps.insert(v, cap);
        }
        match &caps[&node] {
            ExtQ::Finite(x) => Some((x.clone(), hedge)),
            _ => None,
        }
    }

    fn verify_node(&self, strategy: &SimpleStrategy, v: NodeId) -> Result<(), String> {
        if self.l_fails(v) {
            return Ok(());
        }
        let tree = self.tree;
        let w = wealth(tree, strategy, Slot::Node(v))
            .map_err(|e| e.to_string())?
            .as_poly()
            .coeff(0);
        if self.nonneg() && w.is_negative() {
            return Err(format!("wealth {w} < 0 at {}", tree.label(v)));
        }
        if self.is_terminal(v) {
            let f = self.terminal_value(v);
            if w < f {
                return Err(format!("wealth {w} < payoff {f} at {}", tree.label(v)));
            }
            return Ok(());
        }
        for c in tree.children(v) {
            let scope = self.scope(v, c);
            match c {
                ChildRef::Node(u) => match scope {
                    Scope::All => self.verify_node(strategy, u)?,
                    _ if self.nonneg() => self.verify_nonneg(strategy, u)?,
                    _ => {}
                },
                ChildRef::Family(f) => {
                    let fam = tree.family(f);
                    let slot = Slot::Family {
                        family: f,
                        time: self.end,
                    };
                    let w = wealth(tree, strategy, slot).map_err(|e| e.to_string())?.as_poly();
                    let gap = &w - &self.family_cont(f);
                    let ok = match &scope {
                        Scope::All => gap.nonneg_on_members(fam.n0),
                        Scope::Members(list) => list.iter().all(|n| !gap.at_member(*n).is_negative()),
                        Scope::Waived => true,
                    };
                    if !ok {
                        return Err(format!("wealth below payoff on family {}", fam.label));
                    }
                    if self.nonneg() && !w.nonneg_on_members(fam.n0) {
                        return Err(format!("negative wealth on family {}", fam.label));
                    }
                }
            }
        }
        Ok(())
    }

    fn verify_nonneg(&self, strategy: &SimpleStrategy, u: NodeId) -> Result<(), String> {
        let tree = self.tree;
        for v in tree.subtree(u) {
            let w = wealth(tree, strategy, Slot::Node(v))
                .map_err(|e| e.to_string())?
                .as_poly()
                .coeff(0);
            if w.is_negative() {
                return Err(format!("wealth {w} < 0 at {}", tree.label(v)));
            }
            for f in &tree.node(v).families {
                let slot = Slot::Family {
                    family: *f,
                    time: tree.family_time(*f),
                };
                let w = wealth(tree, strategy, slot).map_err(|e| e.to_string())?.as_poly();
                if !w.nonneg_on_members(tree.family(*f).n0) {
                    return Err(format!("negative wealth on family {}", tree.family(*f).label));
                }
            }
        }
        Ok(())
    }
}

fn engine<'a>(
    tree: &'a TrajectoryTree,
    report: &'a AnalysisReport,
    f: &'a PayoffSpec,
    op: Operator,
    cfg: &'a PricingConfig,
) -> Engine<'a> {
    Engine {
        tree,
        report,
        cfg,
        op,
        payoff: f,
        end: match op {
            Operator::SigmaBar => f.maturity,
            Operator::IBar => tree.horizon(),
        },
        memo: BTreeMap::new(),
        undecided: BTreeSet::new(),
        waived: BTreeSet::new(),
        rounds: 0,
    }
}

fn check_inputs(tree: &TrajectoryTree, f: &PayoffSpec, op: Operator) -> Result<(), PricingError> {
    f.validate(tree)?;
    if let Some(v) = tree.nodes().find(|v| tree.node(*v).recurrence.is_some()) {
        return Err(PricingError::Incomplete(tree.label(v).to_string()));
    }
    if op == Operator::IBar && !f.is_nonnegative(tree) {
        return Err(PricingError::NegativePayoff(format!("maturity {}", f.maturity)));
    }
    Ok(())
}

/// Evaluates `σ̄` or `Ī` of `f` at `node`.
pub fn price(
    tree: &TrajectoryTree,
    report: &AnalysisReport,
    f: &PayoffSpec,
    node: NodeId,
    op: Operator,
    cfg: &PricingConfig,
) -> Result<PriceResult, PricingError> {
    check_inputs(tree, f, op)?;
    let mut eng = engine(tree, report, f, op, cfg);
    let value = eng.value(node)?;
    if !eng.undecided.is_empty() {
        return Err(PricingError::Undecided {
            nodes: eng.undecided.iter().map(|v| tree.label(*v).to_string()).collect(),
        });
    }
    let attained = eng.memo.values().all(|o| o.attained);
    let root = eng.memo[&node].clone();
    let (hedge, capital) = match eng.certificate(node) {
        Some((cap, h)) => {
            let strategy = SimpleStrategy {
                initial_capital: cap.clone(),
                hedge: h,
                start_time: tree.node(node).time,
            };
            eng.verify_node(&strategy, node).map_err(PricingError::Certificate)?;
            if ExtQ::Finite(cap.clone()) < value.lo {
                return Err(PricingError::Certificate(format!(
                    "capital {cap} below the lower bound {}",
                    value.lo
                )));
            }
            (Some(strategy), Some(cap))
        }
        None => (None, None),
    };
    Ok(PriceResult {
        operator: op,
        node,
        value,
        attained,
        hedge,
        certificate_capital: capital,
        active_set: root.active.iter().map(|c| c.describe(tree)).collect(),
        drift: root.drift,
        waived: eng.waived.into_iter().collect(),
        model_value: op == Operator::IBar && tree.has_families(),
        rounds: eng.rounds,
    })
}

/// `σ̄_j f` at `node` (`j` is the node's date).
pub fn sigma_bar(
    tree: &TrajectoryTree,
    report: &AnalysisReport,
    f: &PayoffSpec,
    node: NodeId,
    cfg: &PricingConfig,
) -> Result<PriceResult, PricingError> {
    price(tree, report, f, node, Operator::SigmaBar, cfg)
}

/// `Ī_j f` at `node` for nonnegative `f`.
pub fn i_bar(
    tree: &TrajectoryTree,
    report: &AnalysisReport,
    f: &PayoffSpec,
    node: NodeId,
    cfg: &PricingConfig,
) -> Result<PriceResult, PricingError> {
    price(tree, report, f, node, Operator::IBar, cfg)
}

/// Checks a strategy against the requirements of `op` from `node` on:
/// domination of `f` on non-waived trajectories, and for `Ī` nonnegative
/// wealth everywhere up to the horizon.
pub fn verify_certificate(
    tree: &TrajectoryTree,
    report: &AnalysisReport,
    f: &PayoffSpec,
    node: NodeId,
    op: Operator,
    cfg: &PricingConfig,
    strategy: &SimpleStrategy,
) -> Result<(), String> {
    engine(tree, report, f, op, cfg).verify_node(strategy, node)
}
