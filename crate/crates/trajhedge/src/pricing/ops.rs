//! Operations built on the two functionals: null events, `‖·‖_j`, the tower
//! inequality and conditional integrability.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::analysis::{analyze, AnalysisReport};
use crate::model::{FamilyId, NodeId, PayoffSpec, Slot, TrajectoryTree};
use crate::num::{ExtQ, Q};
use crate::poly::{real_roots, Poly};
use crate::pricing::onestep::Bounds;
use crate::pricing::{i_bar, sigma_bar, PriceResult, PricingConfig, PricingError};

/// A building block of an event.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum EventPart {
    /// All trajectories through an explicit node.
    Cylinder(NodeId),
    /// All members of a family.
    Family(FamilyId),
    /// Members `n ≥ from` of a family.
    FamilyTail { family: FamilyId, from: u64 },
    /// A single member.
    Member { family: FamilyId, n: u64 },
}

/// A finite union of cylinders, families, family tails and members.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Event {
    pub parts: Vec<EventPart>,
}

impl Event {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn of(parts: Vec<EventPart>) -> Self {
        Event { parts }
    }
}

/// The indicator of `event` at the horizon, on a copy of the tree where
/// members named individually (or below a tail's start) are explicit.
pub fn indicator(tree: &TrajectoryTree, event: &Event) -> Result<(TrajectoryTree, PayoffSpec), PricingError> {
    let mut split_at: BTreeMap<FamilyId, u64> = BTreeMap::new();
    for part in &event.parts {
        let (f, k) = match part {
            EventPart::FamilyTail { family, from } => (*family, *from),
            EventPart::Member { family, n } => (*family, n + 1),
            _ => continue,
        };
        let e = split_at.entry(f).or_insert(k);
        *e = (*e).max(k);
    }
    let mut split = tree.clone();
    for (f, k) in split_at {
        split = split.split_family(f, k)?;
    }
    let in_cylinder = |v: NodeId| {
        event
            .parts
            .iter()
            .any(|p| matches!(p, EventPart::Cylinder(c) if split.is_ancestor(*c, v)))
    };
    let whole_family = |f: FamilyId| {
        event.parts.iter().any(|p| match p {
            EventPart::Family(g) | EventPart::FamilyTail { family: g, .. } => *g == f,
            _ => false,
        })
    };
    let member = |f: FamilyId, n: u64| {
        event.parts.iter().any(|p| match p {
            EventPart::Family(g) => *g == f,
            EventPart::FamilyTail { family, from } => *family == f && n >= *from,
            EventPart::Member { family, n: m } => *family == f && n == *m,
            EventPart::Cylinder(_) => false,
        })
    };
    let t = split.horizon();
    let f = PayoffSpec::from_slots(&split, t, |s| {
        let hit = match s {
            Slot::Node(v) => in_cylinder(v) || split.member_origin(v).is_some_and(|(f, n)| member(f, n)),
            Slot::Family { family, .. } => whole_family(family) || in_cylinder(split.family(family).parent),
        };
        Poly::constant(if hit { Q::one() } else { Q::zero() })
    });
    Ok((split, f))
}

/// Verdict of [`is_null`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NullReport {
    pub null: bool,
    /// `Ī` of the indicator; a positive lower end certifies non-nullness.
    pub result: PriceResult,
    /// The tree on which the indicator was priced.
    pub tree: TrajectoryTree,
}

/// Whether `event` is conditionally null at `node`: `Ī(1_E) = 0`.
pub fn is_null(
    tree: &TrajectoryTree,
    event: &Event,
    node: NodeId,
    cfg: &PricingConfig,
) -> Result<NullReport, PricingError> {
    let (split, f) = indicator(tree, event)?;
    let report = analyze(&split);
    let result = i_bar(&split, &report, &f, node, cfg)?;
    let null = result.value.lo == ExtQ::zero() && result.value.width() <= cfg.tolerance;
    Ok(NullReport {
        null,
        result,
        tree: split,
    })
}

/// `|g|`, splitting families whose members change sign so that every family
/// keeps a polynomial form.
pub fn abs_payoff(tree: &TrajectoryTree, g: &PayoffSpec) -> Result<(TrajectoryTree, PayoffSpec), PricingError> {
    let mut split = tree.clone();
    for (f, q) in &g.family {
        let n0 = tree.family(*f).n0;
        if q.nonneg_on_members(n0) || (-q).nonneg_on_members(n0) {
            continue;
        }
        let roots = real_roots(&q.to_f64_coeffs(), 0.0, 1.0 / n0 as f64);
        let r = roots.into_iter().filter(|r| *r > 0.0).fold(f64::INFINITY, f64::min);
        let mut k = if r.is_finite() {
            (1.0 / r).floor() as u64 + 1
        } else {
            n0 + 1
        };
        let mut tries = 0;
        while !(q.nonneg_on_members(k) || (-q).nonneg_on_members(k)) {
            k = k.saturating_mul(2);
            tries += 1;
            if tries > 64 {
                return Err(PricingError::Invalid(format!(
                    "payoff on family `{}` changes sign infinitely often",
                    tree.family(*f).label
                )));
            }
        }
        split = split.split_family(*f, k)?;
    }
    let moved = g.transfer(&split);
    let abs = PayoffSpec {
        maturity: moved.maturity,
        explicit: moved.explicit.iter().map(|(v, x)| (*v, x.abs())).collect(),
        family: moved
            .family
            .iter()
            .map(|(f, q)| {
                let n0 = split.family(*f).n0;
                (*f, if q.nonneg_on_members(n0) { q.clone() } else { -q })
            })
            .collect(),
    };
    Ok((split, abs))
}

/// `‖g‖_j = Ī_j |g|` at `node`.
pub fn norm_j(
    tree: &TrajectoryTree,
    g: &PayoffSpec,
    node: NodeId,
    cfg: &PricingConfig,
) -> Result<PriceResult, PricingError> {
    let (split, abs) = abs_payoff(tree, g)?;
    let report = analyze(&split);
    i_bar(&split, &report, &abs, node, cfg)
}

/// `σ̄_k f` at every explicit node of date `k`, together with the payoff of
/// maturity `k` holding the upper ends (`−∞` entries are stored as `0`; they
/// sit at (L)-failing nodes, where any later evaluation is `−∞` again).
pub fn sigma_bar_at_time(
    tree: &TrajectoryTree,
    report: &AnalysisReport,
    f: &PayoffSpec,
    k: usize,
    cfg: &PricingConfig,
) -> Result<(BTreeMap<NodeId, Bounds>, PayoffSpec), PricingError> {
    let mut values = BTreeMap::new();
    for v in tree.nodes_at(k) {
        values.insert(v, sigma_bar(tree, report, f, v, cfg)?.value);
    }
    let m = f.maturity.max(k);
    let g = PayoffSpec::from_slots(tree, k, |s| match s {
        Slot::Node(v) => Poly::constant(values[&v].hi.finite().cloned().unwrap_or_default()),
        Slot::Family { family, .. } => f.at_slot(tree, Slot::Family { family, time: m }),
    });
    Ok((values, g))
}

/// Outcome of a node-by-node comparison.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TowerReport {
    pub holds: bool,
    /// `(node, σ̄_j(σ̄_k f), σ̄_j f)`.
    pub entries: Vec<(String, Bounds, Bounds)>,
    pub witness: Option<String>,
}

/// `σ̄_j(σ̄_k f) ≤ σ̄_j f` at every explicit node of date `j`.
pub fn tower_check(
    tree: &TrajectoryTree,
    report: &AnalysisReport,
    f: &PayoffSpec,
    j: usize,
    k: usize,
    cfg: &PricingConfig,
) -> Result<TowerReport, PricingError> {
    if j > k {
        return Err(PricingError::Invalid(format!("tower check needs j ≤ k, got {j} > {k}")));
    }
    let (_, g) = sigma_bar_at_time(tree, report, f, k, cfg)?;
    let mut entries = Vec::new();
    let mut witness = None;
    for v in tree.nodes_at(j) {
        let lhs = sigma_bar(tree, report, &g, v, cfg)?.value;
        let rhs = sigma_bar(tree, report, f, v, cfg)?.value;
        if lhs.lo > rhs.hi && witness.is_none() {
            witness = Some(format!("{}: {} > {}", tree.label(v), lhs, rhs));
        }
        entries.push((tree.label(v).to_string(), lhs, rhs));
    }
    Ok(TowerReport {
        holds: witness.is_none(),
        entries,
        witness,
    })
}

/// Outcome of [`check_integrable`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntegrabilityReport {
    pub holds: bool,
    /// `(node, σ̄_j f, −σ̄_j(−f))` at non-negligible nodes.
    pub entries: Vec<(String, Bounds, Bounds)>,
    pub witness: Option<String>,
}

/// `σ̄_j f = −σ̄_j(−f)` at every explicit node of date `j` outside the null
/// cover.
pub fn check_integrable(
    tree: &TrajectoryTree,
    report: &AnalysisReport,
    f: &PayoffSpec,
    j: usize,
    cfg: &PricingConfig,
) -> Result<IntegrabilityReport, PricingError> {
    let minus = f.neg();
    let mut entries = Vec::new();
    let mut witness = None;
    for v in tree.nodes_at(j) {
        if report.negligible(tree, v) {
            continue;
        }
        let upper = sigma_bar(tree, report, f, v, cfg)?.value;
        let lower = sigma_bar(tree, report, &minus, v, cfg)?.value.neg();
        let equal = if upper.is_exact() && lower.is_exact() {
            upper == lower
        } else {
            upper.lo <= lower.hi && lower.lo <= upper.hi && upper.width().max(lower.width()) <= cfg.tolerance
        };
        if !equal && witness.is_none() {
            witness = Some(format!("{}: {} ≠ {}", tree.label(v), upper, lower));
        }
        entries.push((tree.label(v).to_string(), upper, lower));
    }
    Ok(IntegrabilityReport {
        holds: witness.is_none(),
        entries,
        witness,
    })
}
