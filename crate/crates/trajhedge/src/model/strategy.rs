//! Non-anticipative hedges and the wealth of simple strategies.

use std::collections::BTreeMap;
use std::fmt;

use crate::model::{FamilyId, ModelError, NodeId, Slot, TrajectoryTree};
use crate::num::{fmt_q, Q};
use crate::poly::Poly;

/// Positions `H_j` indexed by the slot occupied at date `j`; missing entries
/// are zero. Storage by slot makes every hedge non-anticipative.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HedgeSequence {
    pub explicit: BTreeMap<NodeId, Q>,
    pub family: BTreeMap<(FamilyId, usize), Poly>,
}

impl HedgeSequence {
    pub fn new() -> Self {
        Self::default()
    }

    /// The same position at every slot.
    pub fn constant(tree: &TrajectoryTree, h: Q) -> Self {
        let mut out = Self::new();
        for v in tree.nodes() {
            if !tree.is_leaf(v) {
                out.explicit.insert(v, h.clone());
            }
        }
        for f in tree.families() {
            for time in tree.family_time(f)..tree.horizon() {
                out.family.insert((f, time), Poly::constant(h.clone()));
            }
        }
        out
    }

    pub fn set(&mut self, slot: Slot, h: Poly) {
        match slot {
            Slot::Node(v) => {
                self.explicit.insert(v, h.coeff(0));
            }
            Slot::Family { family, time } => {
                self.family.insert((family, time), h);
            }
        }
    }

    /// Position held at a slot (applied to the next increment).
    pub fn at(&self, slot: Slot) -> Poly {
        match slot {
            Slot::Node(v) => Poly::constant(self.explicit.get(&v).cloned().unwrap_or_default()),
            Slot::Family { family, time } => self.family.get(&(family, time)).cloned().unwrap_or_default(),
        }
    }
}

/// Initial capital `V` invested at date `start` with hedge `H`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimpleStrategy {
    pub initial_capital: Q,
    pub hedge: HedgeSequence,
    pub start_time: usize,
}

/// Wealth at a slot: a rational on explicit nodes, a polynomial in `t` inside
/// a family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Wealth {
    Value(Q),
    Poly(Poly),
}

impl Wealth {
    pub fn as_poly(&self) -> Poly {
        match self {
            Wealth::Value(x) => Poly::constant(x.clone()),
            Wealth::Poly(p) => p.clone(),
        }
    }
}

impl fmt::Display for Wealth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Wealth::Value(x) => write!(f, "{}", fmt_q(x)),
            Wealth::Poly(p) => write!(f, "{}", p.pretty()),
        }
    }
}

/// Increment `S_time − S_{time−1}` on arrival at a slot.
pub fn slot_increment(tree: &TrajectoryTree, slot: Slot) -> Poly {
    match slot {
        Slot::Node(v) => Poly::constant(tree.node(v).increment.clone()),
        Slot::Family { family, time } if time == tree.family_time(family) => tree.family(family).increment.clone(),
        Slot::Family { .. } => Poly::zero(),
    }
}

/// `V + Σ_{i=start}^{time−1} H_i ΔS_i` along the path to `slot`.
pub fn wealth(tree: &TrajectoryTree, strategy: &SimpleStrategy, slot: Slot) -> Result<Wealth, ModelError> {
    let time = tree.slot_time(slot);
    if time < strategy.start_time {
        return Err(ModelError::BeforeStart {
            node: tree.describe_slot(slot),
            start: strategy.start_time,
        });
    }
    let mut w = Poly::constant(strategy.initial_capital.clone());
    for i in strategy.start_time..time {
        let here = tree.slot_ancestor(slot, i);
        let next = tree.slot_ancestor(slot, i + 1);
        let h = strategy.hedge.at(here);
        if !h.is_zero() {
            w = &w + &(&h * &slot_increment(tree, next));
        }
    }
    Ok(match slot {
        Slot::Node(_) => Wealth::Value(w.coeff(0)),
        Slot::Family { .. } => Wealth::Poly(w),
    })
}
