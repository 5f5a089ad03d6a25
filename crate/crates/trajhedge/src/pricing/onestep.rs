//! The single-period kernel: `inf_h sup_c (cont_c − h Δ_c)` over explicit
//! children and countable families, solved exactly where possible.
//!
//! Explicit children give finitely many lines. A family contributes the
//! semi-infinite set of lines `(p(1/n), q(1/n))`, `n ≥ n0`. The exchange
//! method keeps a finite working set (every explicit line, the limit line
//! `(p(0), q(0))`, the first member and the zero-increment members), minimizes
//! its envelope exactly, and adds the member that violates the candidate
//! hedge most, found by critical-point analysis of `q − h p` on `(0, 1/n0]`.
//! The working-set minimum is a lower bound; the envelope at the candidate
//! hedge and the two asymptotic values `lim_{h→±∞}` are upper bounds. When
//! the bounds meet at an asymptote only, the infimum is not attained.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::model::{FamilyId, NodeId, TrajectoryTree};
use crate::num::{fmt_q, to_f64, ExtQ, Q};
use crate::poly::Poly;
use crate::pwl::{minimize, Direction, EnvelopeMin, Line};

/// A constraint of the one-step program.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Constraint {
    /// An explicit child.
    Child(NodeId),
    /// Member `n` of a family.
    Member { family: FamilyId, n: u64 },
    /// The `n → ∞` limit of a family.
    Limit(FamilyId),
    /// A synthetic line (used by callers that build programs by hand).
    Extra(usize),
}

impl Constraint {
    pub fn describe(&self, tree: &TrajectoryTree) -> String {
        match self {
            Constraint::Child(v) => tree.label(*v).to_string(),
            Constraint::Member { family, n } => format!("{}[n={}]", tree.family(*family).label, n),
            Constraint::Limit(f) => format!("{}[n→∞]", tree.family(*f).label),
            Constraint::Extra(i) => format!("line{i}"),
        }
    }
}

/// A family child: increments `increment(1/n)` and continuation values
/// `cont(1/n)` for `n ≥ n0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyTerm {
    pub family: FamilyId,
    pub increment: Poly,
    pub cont: Poly,
    pub n0: u64,
}

/// `inf_h max(explicit lines, family lines)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StepProgram {
    pub lines: Vec<(Constraint, Line)>,
    pub families: Vec<FamilyTerm>,
}

/// Lower and upper bound of a value; exact when both coincide.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Bounds {
    pub lo: ExtQ,
    pub hi: ExtQ,
}

impl Bounds {
    pub fn exact(x: ExtQ) -> Self {
        Bounds { lo: x.clone(), hi: x }
    }

    pub fn finite(x: Q) -> Self {
        Self::exact(ExtQ::Finite(x))
    }

    pub fn neg_inf() -> Self {
        Self::exact(ExtQ::NegInf)
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    /// The exact value, if the bounds coincide.
    pub fn value(&self) -> Option<&ExtQ> {
        self.is_exact().then_some(&self.lo)
    }

    /// The exact finite value, if any.
    pub fn as_q(&self) -> Option<&Q> {
        self.value().and_then(ExtQ::finite)
    }

    /// Width `hi − lo` as a float (`0` when exact, `∞` for infinite ends).
    pub fn width(&self) -> f64 {
        match (&self.lo, &self.hi) {
            (a, b) if a == b => 0.0,
            (ExtQ::Finite(a), ExtQ::Finite(b)) => to_f64(&(b - a)),
            _ => f64::INFINITY,
        }
    }

    pub fn contains(&self, x: &Q) -> bool {
        let x = ExtQ::Finite(x.clone());
        self.lo <= x && x <= self.hi
    }

    /// Rounds an interval of width ≤ `tol` to the unique simplest rational
    /// inside it (the value itself when exact).
    pub fn rounded(&self, max_denominator: u64) -> Option<Q> {
        if let Some(x) = self.as_q() {
            return Some(x.clone());
        }
        let (ExtQ::Finite(a), ExtQ::Finite(b)) = (&self.lo, &self.hi) else {
            return None;
        };
        for d in 1..=max_denominator {
            let dq = Q::from_integer(d.into());
            let n = (a * &dq).ceil();
            let cand = &n / &dq;
            if &cand <= b {
                return Some(cand);
            }
        }
        None
    }

    pub fn max_with(&self, x: &Q) -> Bounds {
        let f = ExtQ::Finite(x.clone());
        Bounds {
            lo: self.lo.clone().max(f.clone()),
            hi: self.hi.clone().max(f),
        }
    }

    pub fn neg(&self) -> Bounds {
        Bounds {
            lo: self.hi.neg(),
            hi: self.lo.neg(),
        }
    }
}

impl fmt::Display for Bounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_exact() {
            write!(f, "{}", self.lo)
        } else {
            write!(f, "[{}, {}]", self.lo, self.hi)
        }
    }
}

/// Solution of a one-step program.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepSolution {
    pub value: Bounds,
    pub attained: bool,
    /// An optimal hedge when attained, otherwise a hedge whose cost is within
    /// the near-optimality slack (absent for `−∞` values).
    pub hedge: Option<Q>,
    /// Direction in which near-optimal hedges escape when not attained.
    pub drift: Option<Direction>,
    /// Constraints tight at the reported value.
    pub active: Vec<Constraint>,
    pub rounds: usize,
}

/// Failure of the exchange method to close the gap.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Unconverged {
    pub lo: Q,
    pub hi: ExtQ,
    pub rounds: usize,
}

/// Outcome of a feasibility search `∃h: φ(h) ≤ target`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Feasibility {
    Feasible { hedge: Q, rounds: usize },
    Infeasible { rounds: usize, reason: String },
    Unconverged { rounds: usize },
}

impl Feasibility {
    pub fn hedge(&self) -> Option<&Q> {
        match self {
            Feasibility::Feasible { hedge, .. } => Some(hedge),
            _ => None,
        }
    }
}

/// Solver knobs.
#[derive(Clone, Debug, PartialEq)]
pub struct StepConfig {
    pub max_rounds: usize,
    /// Stop once `upper − lower` is at most this.
    pub gap: f64,
    /// Slack allowed for near-optimal hedges of unattained infima.
    pub slack: Q,
}

impl Default for StepConfig {
    fn default() -> Self {
        StepConfig {
            max_rounds: 200,
            gap: 1e-12,
            slack: Q::new(1.into(), 1_000_000_000u64.into()),
        }
    }
}

impl StepProgram {
    pub fn is_empty(&self) -> bool {
        self.lines.is_empty() && self.families.is_empty()
    }

    /// `φ(h)`, exactly.
    pub fn envelope(&self, h: &Q) -> ExtQ {
        let mut best = ExtQ::NegInf;
        for (_, l) in &self.lines {
            best = best.max(ExtQ::Finite(l.at(h)));
        }
        for fam in &self.families {
            let g = &fam.cont - &fam.increment.scale(h);
            best = best.max(ExtQ::Finite(g.sup_members(fam.n0).value));
        }
        best
    }

    /// `lim φ(h)` as `h → ±∞`.
    pub fn asymptote(&self, dir: Direction) -> ExtQ {
        // Moving h up, lines with Δ < 0 blow up; moving down, lines with Δ > 0.
        let blows = |d: &Q| match dir {
            Direction::Up => d.is_negative(),
            Direction::Down => d.is_positive(),
        };
        let mut best = ExtQ::NegInf;
        for (_, l) in &self.lines {
            if blows(&l.delta) {
                return ExtQ::PosInf;
            }
            if l.delta.is_zero() {
                best = best.max(ExtQ::Finite(l.cont.clone()));
            }
        }
        for fam in &self.families {
            let p = &fam.increment;
            let bad = match dir {
                Direction::Up => p.has_negative_member(fam.n0),
                Direction::Down => p.has_positive_member(fam.n0),
            };
            if bad {
                return ExtQ::PosInf;
            }
            for n in p.zero_members(fam.n0) {
                best = best.max(ExtQ::Finite(fam.cont.at_member(n)));
            }
            if p.at_zero().is_zero() {
                best = best.max(ExtQ::Finite(fam.cont.at_zero()));
            }
        }
        best
    }

    fn member_line(fam: &FamilyTerm, n: u64) -> (Constraint, Line) {
        (
            Constraint::Member { family: fam.family, n },
            Line::new(fam.increment.at_member(n), fam.cont.at_member(n)),
        )
    }

    fn initial_working_set(&self) -> Vec<(Constraint, Line)> {
        let mut w = self.lines.clone();
        for fam in &self.families {
            w.push((
                Constraint::Limit(fam.family),
                Line::new(fam.increment.at_zero(), fam.cont.at_zero()),
            ));
            w.push(Self::member_line(fam, fam.n0));
            for n in fam.increment.zero_members(fam.n0) {
                if n != fam.n0 {
                    w.push(Self::member_line(fam, n));
                }
            }
        }
        w
    }

    /// Constraints tight at `(h, value)` among explicit lines and members.
    pub fn tight_at(&self, h: &Q, value: &Q) -> Vec<Constraint> {
        let mut out = BTreeSet::new();
        for (c, l) in &self.lines {
            if l.at(h) == *value {
                out.insert(*c);
            }
        }
        for fam in &self.families {
            let g = &fam.cont - &fam.increment.scale(h);
            let s = g.sup_members(fam.n0);
            if s.value == *value {
                match s.attained_at {
                    Some(n) => {
                        for m in (&g - &Poly::constant(value.clone())).zero_members(fam.n0) {
                            out.insert(Constraint::Member {
                                family: fam.family,
                                n: m,
                            });
                        }
                        out.insert(Constraint::Member { family: fam.family, n });
                    }
                    None => {
                        out.insert(Constraint::Limit(fam.family));
                    }
                }
            }
        }
        out.into_iter().collect()
    }

    /// Constraints that carry the asymptotic value.
    fn asymptotic_active(&self, value: &Q) -> Vec<Constraint> {
        let mut out = Vec::new();
        for (c, l) in &self.lines {
            if l.delta.is_zero() && l.cont == *value {
                out.push(*c);
            }
        }
        for fam in &self.families {
            if fam.increment.at_zero().is_zero() && fam.cont.at_zero() == *value {
                out.push(Constraint::Limit(fam.family));
            }
        }
        out
    }

    /// Solves the program by the exchange method.
    #[allow(clippy::result_large_err)]
    pub fn solve(&self, cfg: &StepConfig) -> Result<StepSolution, Unconverged> {
        if self.is_empty() {
            return Ok(StepSolution {
                value: Bounds::neg_inf(),
                attained: true,
                hedge: Some(Q::zero()),
                drift: None,
                active: Vec::new(),
                rounds: 0,
            });
        }
        let mut w = self.initial_working_set();
        let mut seen: BTreeSet<Constraint> = w.iter().map(|(c, _)| *c).collect();
        let mut best: Option<(Q, ExtQ)> = None;
        for round in 1..=cfg.max_rounds {
            let lines: Vec<Line> = w.iter().map(|(_, l)| l.clone()).collect();
            match minimize(&lines) {
                EnvelopeMin::Empty => unreachable!("working set is never empty"),
                EnvelopeMin::Unbounded(dir) => {
                    // A bounding member of opposite slope, if any exists.
                    let mut added = false;
                    for fam in &self.families {
                        let ext = match dir {
                            Direction::Up => fam.increment.inf_members(fam.n0),
                            Direction::Down => fam.increment.sup_members(fam.n0),
                        };
                        let opposing = match dir {
                            Direction::Up => !ext.value.is_positive(),
                            Direction::Down => !ext.value.is_negative(),
                        };
                        if let (true, Some(n)) = (opposing, ext.attained_at) {
                            let c = Constraint::Member { family: fam.family, n };
                            if seen.insert(c) {
                                w.push(Self::member_line(fam, n));
                                added = true;
                            }
                        }
                    }
                    if !added {
                        return Ok(StepSolution {
                            value: Bounds::neg_inf(),
                            attained: false,
                            hedge: None,
                            drift: Some(dir),
                            active: Vec::new(),
                            rounds: round,
                        });
                    }
                }
                EnvelopeMin::Bounded { value: lb, lo, hi } => {
                    let h = crate::pwl::clamp_zero(lo.as_ref(), hi.as_ref());
                    let phi = self.envelope(&h);
                    if phi == ExtQ::Finite(lb.clone()) {
                        return Ok(StepSolution {
                            active: self.tight_at(&h, &lb),
                            value: Bounds::finite(lb),
                            attained: true,
                            hedge: Some(h),
                            drift: None,
                            rounds: round,
                        });
                    }
                    let up = self.asymptote(Direction::Up);
                    let down = self.asymptote(Direction::Down);
                    let lbx = ExtQ::Finite(lb.clone());
                    if up <= lbx || down <= lbx {
                        return Ok(self.asymptotic(lb, up <= lbx, cfg, round));
                    }
                    let ub = phi.clone().min(up).min(down);
                    best = Some((lb.clone(), ub.clone()));
                    if let ExtQ::Finite(u) = &ub {
                        if to_f64(&(u - &lb)) <= cfg.gap {
                            return Ok(StepSolution {
                                active: self.tight_at(&h, &lb),
                                value: Bounds {
                                    lo: lbx,
                                    hi: phi.clone(),
                                },
                                attained: false,
                                hedge: Some(h),
                                drift: None,
                                rounds: round,
                            });
                        }
                    }
                    let mut added = false;
                    for fam in &self.families {
                        let g = &fam.cont - &fam.increment.scale(&h);
                        let s = g.sup_members(fam.n0);
                        if s.value > lb {
                            if let Some(n) = s.attained_at {
                                let c = Constraint::Member { family: fam.family, n };
                                if seen.insert(c) {
                                    w.push(Self::member_line(fam, n));
                                    added = true;
                                }
                            }
                        }
                    }
                    if !added {
                        break;
                    }
                }
            }
        }
        let (lo, hi) = best.unwrap_or((Q::zero(), ExtQ::PosInf));
        Err(Unconverged {
            lo,
            hi,
            rounds: cfg.max_rounds,
        })
    }

    /// Value equal to an asymptote: decide attainment, then build a hedge.
    fn asymptotic(&self, value: Q, via_up: bool, cfg: &StepConfig, round: usize) -> StepSolution {
        if let Feasibility::Feasible { hedge, .. } = self.feasible_hedge(&value, cfg.max_rounds) {
            return StepSolution {
                active: self.tight_at(&hedge, &value),
                value: Bounds::finite(value),
                attained: true,
                hedge: Some(hedge),
                drift: None,
                rounds: round,
            };
        }
        let dir = if via_up { Direction::Up } else { Direction::Down };
        let target = &value + &cfg.slack;
        let hedge = match self.feasible_hedge(&target, cfg.max_rounds) {
            Feasibility::Feasible { hedge, .. } => Some(hedge),
            _ => self.drift_search(dir, &target),
        };
        StepSolution {
            active: self.asymptotic_active(&value),
            value: Bounds::finite(value),
            attained: false,
            hedge,
            drift: Some(dir),
            rounds: round,
        }
    }

    /// Doubling search along `dir` for a hedge with `φ(h) ≤ target`.
    fn drift_search(&self, dir: Direction, target: &Q) -> Option<Q> {
        let mut step = Q::one();
        let sign = Q::from_integer(dir.sign().into());
        for _ in 0..200 {
            let h = &step * &sign;
            if self.envelope(&h) <= ExtQ::Finite(target.clone()) {
                return Some(h);
            }
            step = &step * Q::from_integer(2.into());
        }
        None
    }

    /// Searches for a hedge with `φ(h) ≤ target` by exchange over member
    /// half-lines, starting from the tail condition of each family (the sign
    /// of the lowest-order nonzero coefficient of `q − target − h p` as
    /// `t → 0`).
    pub fn feasible_hedge(&self, target: &Q, max_rounds: usize) -> Feasibility {
        let mut set = HedgeSet::all();
        for (c, l) in &self.lines {
            set.require(&l.delta, &(&l.cont - target));
            if set.is_empty() {
                return Feasibility::Infeasible {
                    rounds: 0,
                    reason: format!("{c:?} alone exceeds the target"),
                };
            }
        }
        for fam in &self.families {
            let a = &fam.cont - &Poly::constant(target.clone());
            set.intersect(&tail_set(&a, &fam.increment));
            if set.is_empty() {
                return Feasibility::Infeasible {
                    rounds: 1,
                    reason: format!("tail of family {:?} exceeds the target for every hedge", fam.family),
                };
            }
            for n in std::iter::once(fam.n0).chain(fam.increment.zero_members(fam.n0)) {
                set.require(&fam.increment.at_member(n), &a.at_member(n));
            }
        }
        for round in 1..=max_rounds {
            let Some(h) = set.pick() else {
                return Feasibility::Infeasible {
                    rounds: round,
                    reason: "member constraints leave no admissible hedge".into(),
                };
            };
            let mut ok = true;
            for fam in &self.families {
                let g = &(&fam.cont - &Poly::constant(target.clone())) - &fam.increment.scale(&h);
                let s = g.sup_members(fam.n0);
                if s.value.is_positive() {
                    ok = false;
                    match s.attained_at {
                        Some(n) => set.require(&fam.increment.at_member(n), &(&fam.cont.at_member(n) - target)),
                        None => return Feasibility::Unconverged { rounds: round },
                    }
                }
            }
            if ok {
                let explicit_ok = self.lines.iter().all(|(_, l)| l.at(&h) <= *target);
                if explicit_ok {
                    return Feasibility::Feasible {
                        hedge: h,
                        rounds: round,
                    };
                }
                return Feasibility::Unconverged { rounds: round };
            }
        }
        Feasibility::Unconverged { rounds: max_rounds }
    }
}

/// An interval of hedges with open or closed ends.
#[derive(Clone, Debug, PartialEq, Eq)]
struct HedgeSet {
    lo: Option<(Q, bool)>,
    hi: Option<(Q, bool)>,
    empty: bool,
}

impl HedgeSet {
    fn all() -> Self {
        HedgeSet {
            lo: None,
            hi: None,
            empty: false,
        }
    }

    fn none() -> Self {
        HedgeSet {
            lo: None,
            hi: None,
            empty: true,
        }
    }

    fn cut_lo(&mut self, x: Q, closed: bool) {
        let replace = match &self.lo {
            None => true,
            Some((y, c)) => x > *y || (x == *y && !closed && *c),
        };
        if replace {
            self.lo = Some((x, closed));
        }
        self.normalize();
    }

    fn cut_hi(&mut self, x: Q, closed: bool) {
        let replace = match &self.hi {
            None => true,
            Some((y, c)) => x < *y || (x == *y && !closed && *c),
        };
        if replace {
            self.hi = Some((x, closed));
        }
        self.normalize();
    }

    fn normalize(&mut self) {
        if let (Some((a, ca)), Some((b, cb))) = (&self.lo, &self.hi) {
            if a > b || (a == b && !(*ca && *cb)) {
                self.empty = true;
            }
        }
    }

    fn intersect(&mut self, other: &HedgeSet) {
        if other.empty {
            self.empty = true;
            return;
        }
        if let Some((x, c)) = &other.lo {
            self.cut_lo(x.clone(), *c);
        }
        if let Some((x, c)) = &other.hi {
            self.cut_hi(x.clone(), *c);
        }
    }

    /// `a − h·delta ≤ 0`, i.e. `h·delta ≥ a`.
    fn require(&mut self, delta: &Q, a: &Q) {
        if delta.is_zero() {
            if a.is_positive() {
                self.empty = true;
            }
        } else if delta.is_positive() {
            self.cut_lo(a / delta, true);
        } else {
            self.cut_hi(a / delta, true);
        }
    }

    fn is_empty(&self) -> bool {
        self.empty
    }

    /// A point of the set, preferring the one closest to zero.
    fn pick(&self) -> Option<Q> {
        if self.empty {
            return None;
        }
        let inside = |x: &Q| {
            self.lo.as_ref().is_none_or(|(a, c)| x > a || (*c && x == a))
                && self.hi.as_ref().is_none_or(|(b, c)| x < b || (*c && x == b))
        };
        if inside(&Q::zero()) {
            return Some(Q::zero());
        }
        let two = Q::from_integer(2.into());
        if let Some((a, c)) = &self.lo {
            if a.is_positive() || a.is_zero() {
                if *c {
                    return Some(a.clone());
                }
                return Some(match &self.hi {
                    Some((b, _)) => (a + b) / &two,
                    None => a + Q::one(),
                });
            }
        }
        if let Some((b, c)) = &self.hi {
            if *c {
                return Some(b.clone());
            }
            return Some(match &self.lo {
                Some((a, _)) => (a + b) / &two,
                None => b - Q::one(),
            });
        }
        None
    }
}

/// The set of hedges `h` for which `a(t) − h p(t) ≤ 0` for all small `t > 0`.
fn tail_set(a: &Poly, p: &Poly) -> HedgeSet {
    let deg = a.coeffs().len().max(p.coeffs().len());
    for k in 0..deg {
        let ak = a.coeff(k);
        let pk = p.coeff(k);
        if pk.is_zero() {
            if ak.is_negative() {
                return HedgeSet::all();
            }
            if ak.is_positive() {
                return HedgeSet::none();
            }
            continue;
        }
        let hk = &ak / &pk;
        // The remaining coefficients decide the boundary point itself.
        let rest = a - &p.scale(&hk);
        let closed = match rest.lowest_order() {
            None => true,
            Some(i) => rest.coeff(i).is_negative(),
        };
        let mut s = HedgeSet::all();
        // ak − h pk < 0  ⇔  h pk > ak.
        if pk.is_positive() {
            s.cut_lo(hk, closed);
        } else {
            s.cut_hi(hk, closed);
        }
        return s;
    }
    HedgeSet::all()
}

/// Short display of a hedge.
pub fn fmt_hedge(h: &Option<Q>) -> String {
    h.as_ref().map(fmt_q).unwrap_or_else(|| "none".into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{q, qi};

    fn fam(p: &str, c: &str) -> FamilyTerm {
        FamilyTerm {
            family: FamilyId(0),
            increment: Poly::parse(p).unwrap(),
            cont: Poly::parse(c).unwrap(),
            n0: 1,
        }
    }

    #[test]
    fn two_children() {
        let prog = StepProgram {
            lines: vec![
                (Constraint::Extra(0), Line::new(qi(1), qi(2))),
                (Constraint::Extra(1), Line::new(qi(-1), qi(0))),
            ],
            families: vec![],
        };
        let s = prog.solve(&StepConfig::default()).unwrap();
        assert_eq!(s.value, Bounds::finite(qi(1)));
        assert_eq!(s.hedge, Some(qi(1)));
        assert!(s.attained);
    }

    #[test]
    fn flat_child() {
        let prog = StepProgram {
            lines: vec![(Constraint::Extra(0), Line::new(qi(0), q(3, 7)))],
            families: vec![],
        };
        let s = prog.solve(&StepConfig::default()).unwrap();
        assert_eq!(s.value, Bounds::finite(q(3, 7)));
    }

    #[test]
    fn unattained_down_family() {
        // cont 1/n, increment −1/n²: value 0, not attained, hedge drifts down.
        let prog = StepProgram {
            lines: vec![],
            families: vec![fam("0,0,-1", "0,1")],
        };
        let s = prog.solve(&StepConfig::default()).unwrap();
        assert_eq!(s.value, Bounds::finite(qi(0)));
        assert!(!s.attained);
        assert_eq!(s.drift, Some(Direction::Down));
        let h = s.hedge.unwrap();
        assert!(prog.envelope(&h) <= ExtQ::Finite(StepConfig::default().slack));
        assert!(matches!(
            prog.feasible_hedge(&qi(0), 200),
            Feasibility::Infeasible { .. }
        ));
    }

    #[test]
    fn nonnegative_program() {
        // Up child with requirement 0 plus the down family: value 1/2 at h = −1/2.
        let prog = StepProgram {
            lines: vec![(Constraint::Extra(0), Line::new(qi(1), qi(0)))],
            families: vec![fam("0,0,-1", "0,1")],
        };
        let s = prog.solve(&StepConfig::default()).unwrap();
        assert_eq!(s.value, Bounds::finite(q(1, 2)));
        assert_eq!(s.hedge, Some(q(-1, 2)));
        assert!(s.attained);
    }

    #[test]
    fn one_sided_is_minus_infinity() {
        let prog = StepProgram {
            lines: vec![],
            families: vec![fam("1,1", "5")],
        };
        let s = prog.solve(&StepConfig::default()).unwrap();
        assert_eq!(s.value, Bounds::neg_inf());
        assert_eq!(s.drift, Some(Direction::Up));
        // Increments approaching 0 leave the limit line: the value stays finite.
        let prog = StepProgram {
            lines: vec![],
            families: vec![fam("0,1", "5")],
        };
        let s = prog.solve(&StepConfig::default()).unwrap();
        assert_eq!(s.value, Bounds::finite(qi(5)));
    }

    #[test]
    fn feasibility_with_slack() {
        let prog = StepProgram {
            lines: vec![],
            families: vec![fam("0,0,-1", "0,1")],
        };
        for d in [q(1, 2), q(1, 10), q(1, 1000)] {
            let h = prog.feasible_hedge(&d, 200).hedge().cloned().expect("feasible");
            assert!(prog.envelope(&h) <= ExtQ::Finite(d));
        }
    }
}
