//! Finite-maturity payoffs and process sequences.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use crate::model::{FamilyId, ModelError, NodeId, Slot, TrajectoryTree};
use crate::num::Q;
use crate::poly::Poly;

/// A function of the path up to `maturity`: one rational per explicit node at
/// that date and one polynomial in `t = 1/n` per family alive at that date.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PayoffSpec {
    pub maturity: usize,
    pub explicit: BTreeMap<NodeId, Q>,
    pub family: BTreeMap<FamilyId, Poly>,
}

impl PayoffSpec {
    /// Builds a payoff by evaluating closures on every slot at `maturity`.
    pub fn from_fns(
        tree: &TrajectoryTree,
        maturity: usize,
        mut node_value: impl FnMut(NodeId) -> Q,
        mut family_value: impl FnMut(FamilyId) -> Poly,
    ) -> Self {
        PayoffSpec {
            maturity,
            explicit: tree
                .nodes_at(maturity)
                .into_iter()
                .map(|v| (v, node_value(v)))
                .collect(),
            family: tree
                .families_at(maturity)
                .into_iter()
                .map(|f| (f, family_value(f)))
                .collect(),
        }
    }

    /// Builds a payoff from a closure on slots returning polynomials; node
    /// slots must receive constants.
    pub fn from_slots(tree: &TrajectoryTree, maturity: usize, mut value: impl FnMut(Slot) -> Poly) -> Self {
        PayoffSpec {
            maturity,
            explicit: tree
                .nodes_at(maturity)
                .into_iter()
                .map(|v| (v, value(Slot::Node(v)).coeff(0)))
                .collect(),
            family: tree
                .families_at(maturity)
                .into_iter()
                .map(|family| (family, value(Slot::Family { family, time: maturity })))
                .collect(),
        }
    }

    pub fn constant(tree: &TrajectoryTree, maturity: usize, c: Q) -> Self {
        Self::from_fns(tree, maturity, |_| c.clone(), |_| Poly::constant(c.clone()))
    }

    /// The coordinate `S_maturity`.
    pub fn coordinate(tree: &TrajectoryTree, maturity: usize) -> Self {
        Self::from_fns(tree, maturity, |v| tree.node(v).value.clone(), |f| tree.family_value(f))
    }

    /// Checks that exactly the slots at maturity are covered.
    pub fn validate(&self, tree: &TrajectoryTree) -> Result<(), ModelError> {
        if self.maturity > tree.horizon() {
            return Err(ModelError::HorizonMismatch(format!(
                "payoff maturity {} exceeds horizon {}",
                self.maturity,
                tree.horizon()
            )));
        }
        for v in tree.nodes_at(self.maturity) {
            if !self.explicit.contains_key(&v) {
                return Err(ModelError::Uncovered(format!("node `{}`", tree.label(v))));
            }
        }
        for f in tree.families_at(self.maturity) {
            if !self.family.contains_key(&f) {
                return Err(ModelError::Uncovered(format!("family `{}`", tree.family(f).label)));
            }
        }
        for v in self.explicit.keys() {
            if v.0 >= tree.num_nodes() || tree.node(*v).time != self.maturity {
                return Err(ModelError::Invalid(format!(
                    "payoff entry for a node not at date {}",
                    self.maturity
                )));
            }
        }
        let alive = tree.families_at(self.maturity);
        for f in self.family.keys() {
            if !alive.contains(f) {
                return Err(ModelError::Invalid(format!(
                    "payoff entry for family not alive at date {}",
                    self.maturity
                )));
            }
        }
        Ok(())
    }

    /// Value at any slot at or after maturity (a constant polynomial on
    /// explicit nodes).
    pub fn at_slot(&self, tree: &TrajectoryTree, slot: Slot) -> Poly {
        match tree.slot_ancestor(slot, self.maturity) {
            Slot::Node(v) => Poly::constant(self.explicit.get(&v).cloned().unwrap_or_default()),
            Slot::Family { family, .. } => self.family.get(&family).cloned().unwrap_or_default(),
        }
    }

    /// Value at an explicit node at or after maturity.
    pub fn at_node(&self, tree: &TrajectoryTree, v: NodeId) -> Q {
        self.at_slot(tree, Slot::Node(v)).coeff(0)
    }

    /// The same function viewed as having a later maturity.
    pub fn lift(&self, tree: &TrajectoryTree, maturity: usize) -> PayoffSpec {
        let m = maturity.max(self.maturity);
        PayoffSpec::from_slots(tree, m, |s| self.at_slot(tree, s))
    }

    /// The same function on a tree obtained from `self`'s tree by
    /// [`TrajectoryTree::split_family`]: split member nodes take the family
    /// value of the member they stand for.
    pub fn transfer(&self, split: &TrajectoryTree) -> PayoffSpec {
        PayoffSpec::from_slots(split, self.maturity, |s| match split.slot_ancestor(s, self.maturity) {
            Slot::Node(v) => match split.member_origin(v) {
                Some((f, n)) => match self.family.get(&f) {
                    Some(p) => Poly::constant(p.at_member(n)),
                    // The payoff matured before the family branched.
                    None => self.at_slot(split, Slot::Node(split.ancestor_at(v, self.maturity))),
                },
                None => self.at_slot(split, s),
            },
            other => self.at_slot(split, other),
        })
    }

    fn zip(&self, other: &PayoffSpec, tree: &TrajectoryTree, op: impl Fn(&Poly, &Poly) -> Poly) -> PayoffSpec {
        let m = self.maturity.max(other.maturity);
        PayoffSpec::from_slots(tree, m, |s| op(&self.at_slot(tree, s), &other.at_slot(tree, s)))
    }

    pub fn add(&self, other: &PayoffSpec, tree: &TrajectoryTree) -> PayoffSpec {
        self.zip(other, tree, |a, b| a + b)
    }

    pub fn sub(&self, other: &PayoffSpec, tree: &TrajectoryTree) -> PayoffSpec {
        self.zip(other, tree, |a, b| a - b)
    }

    pub fn scale(&self, c: &Q) -> PayoffSpec {
        PayoffSpec {
            maturity: self.maturity,
            explicit: self.explicit.iter().map(|(k, v)| (*k, v * c)).collect(),
            family: self.family.iter().map(|(k, p)| (*k, p.scale(c))).collect(),
        }
    }

    pub fn neg(&self) -> PayoffSpec {
        self.scale(&-Q::from_integer(1.into()))
    }

    /// Whether every explicit value and every family member value is ≥ 0.
    pub fn is_nonnegative(&self, tree: &TrajectoryTree) -> bool {
        self.explicit.values().all(|x| !x.is_negative())
            && self.family.iter().all(|(f, p)| p.nonneg_on_members(tree.family(*f).n0))
    }

    /// Whether all values are zero.
    pub fn is_zero(&self) -> bool {
        self.explicit.values().all(Zero::is_zero) && self.family.values().all(Poly::is_zero)
    }

    /// Largest polynomial degree used on a family.
    pub fn max_degree(&self) -> usize {
        self.family.values().filter_map(Poly::degree).max().unwrap_or(0)
    }
}

/// A sequence `(f_j)_{j=0..T}` of non-anticipative real-valued functions,
/// `f_j` having maturity `j`; `f_j = f_T` for `j > T`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProcessSequence {
    pub steps: Vec<PayoffSpec>,
}

impl ProcessSequence {
    pub fn new(steps: Vec<PayoffSpec>) -> Self {
        ProcessSequence { steps }
    }

    pub fn validate(&self, tree: &TrajectoryTree) -> Result<(), ModelError> {
        if self.steps.len() != tree.horizon() + 1 {
            return Err(ModelError::HorizonMismatch(format!(
                "process has {} dates, tree has {}",
                self.steps.len(),
                tree.horizon() + 1
            )));
        }
        for (j, f) in self.steps.iter().enumerate() {
            if f.maturity != j {
                return Err(ModelError::Invalid(format!(
                    "process entry {j} has maturity {}",
                    f.maturity
                )));
            }
            f.validate(tree)?;
        }
        Ok(())
    }

    /// `f_j = S_j`.
    pub fn coordinate(tree: &TrajectoryTree) -> Self {
        Self::new((0..=tree.horizon()).map(|j| PayoffSpec::coordinate(tree, j)).collect())
    }

    /// `f_j = c_j`, constant in the path.
    pub fn constants(tree: &TrajectoryTree, values: &[Q]) -> Self {
        Self::new(
            (0..=tree.horizon())
                .map(|j| PayoffSpec::constant(tree, j, values[j.min(values.len() - 1)].clone()))
                .collect(),
        )
    }

    /// `f_0 = c` and `f_j = f` for `j ≥ 1`; `f` must have maturity ≤ 1.
    pub fn start_then(tree: &TrajectoryTree, c: Q, f: &PayoffSpec) -> Result<Self, ModelError> {
        if f.maturity > 1 {
            return Err(ModelError::Invalid(format!(
                "payoff of maturity {} cannot be used from date 1 on",
                f.maturity
            )));
        }
        let mut steps = vec![PayoffSpec::constant(tree, 0, c)];
        steps.extend((1..=tree.horizon()).map(|j| f.lift(tree, j)));
        Ok(Self::new(steps))
    }

    /// Value of `f_j` at a slot at or after date `j` (dates beyond `T` use `f_T`).
    pub fn at(&self, tree: &TrajectoryTree, j: usize, slot: Slot) -> Poly {
        self.steps[j.min(self.steps.len() - 1)].at_slot(tree, slot)
    }

    pub fn is_nonnegative(&self, tree: &TrajectoryTree) -> bool {
        self.steps.iter().all(|f| f.is_nonnegative(tree))
    }
}
