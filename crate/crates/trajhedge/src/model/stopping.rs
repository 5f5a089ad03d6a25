//! Trajectory-based stopping times, stopped sequences and transforms.

use std::collections::BTreeSet;

use num_traits::{One, Signed};

use crate::model::{HedgeSequence, ModelError, PayoffSpec, ProcessSequence, Slot, TrajectoryTree};
use crate::num::Q;
use crate::poly::Poly;

/// A stopping time given by marked slots: a trajectory stops at the first
/// marked slot on its path and never stops if none is marked. Marking slots
/// (rather than trajectories) makes the consistency condition automatic.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StoppingTime {
    pub marks: BTreeSet<Slot>,
}

impl StoppingTime {
    /// `τ ≡ ∞`.
    pub fn never() -> Self {
        Self::default()
    }

    /// `τ ≡ k`.
    pub fn at_time(tree: &TrajectoryTree, k: usize) -> Self {
        StoppingTime {
            marks: tree.slots_at(k).into_iter().collect(),
        }
    }

    /// `τ = inf{j : S_j ≥ level}`. A family slot must be uniformly above or
    /// uniformly below the level, otherwise the time is not representable by
    /// whole-slot marks.
    pub fn first_hitting_at_least(tree: &TrajectoryTree, level: &Q) -> Result<Self, ModelError> {
        let mut marks = BTreeSet::new();
        for time in 0..=tree.horizon() {
            for s in tree.slots_at(time) {
                let hit = match s {
                    Slot::Node(v) => tree.node(v).value >= *level,
                    Slot::Family { family, .. } => {
                        let fam = tree.family(family);
                        let gap = &tree.family_value(family) - &Poly::constant(level.clone());
                        if gap.nonneg_on_members(fam.n0) {
                            true
                        } else if !gap.exists_member_ge(&Q::from_integer(0.into()), fam.n0) {
                            false
                        } else {
                            return Err(ModelError::NotRepresentable(format!(
                                "family `{}` crosses level {} between members",
                                fam.label, level
                            )));
                        }
                    }
                };
                if hit {
                    marks.insert(s);
                }
            }
        }
        Ok(StoppingTime { marks })
    }

    /// Stopping date along the path to `slot`, if it is at most the slot's date.
    pub fn stopped_by(&self, tree: &TrajectoryTree, slot: Slot) -> Option<usize> {
        (0..=tree.slot_time(slot)).find(|&i| self.marks.contains(&tree.slot_ancestor(slot, i)))
    }

    /// The weights `D_i = 1{τ > i}`, whose transform is the stopped sequence.
    pub fn continuation_weights(&self, tree: &TrajectoryTree) -> HedgeSequence {
        let mut d = HedgeSequence::new();
        for time in 0..tree.horizon() {
            for s in tree.slots_at(time) {
                if self.stopped_by(tree, s).is_none() {
                    d.set(s, Poly::constant(Q::one()));
                }
            }
        }
        d
    }
}

/// `(f_{τ∧j})_j`.
pub fn stopped_process(tree: &TrajectoryTree, f: &ProcessSequence, tau: &StoppingTime) -> ProcessSequence {
    ProcessSequence::new(
        (0..f.steps.len())
            .map(|j| {
                PayoffSpec::from_slots(tree, j, |s| match tau.stopped_by(tree, s) {
                    Some(k) => f.at(tree, k, s),
                    None => f.at(tree, j, s),
                })
            })
            .collect(),
    )
}

/// `g_j = f_0 + Σ_{i<j} D_i (f_{i+1} − f_i)` for nonnegative weights `D`.
pub fn supermartingale_transform(
    tree: &TrajectoryTree,
    f: &ProcessSequence,
    d: &HedgeSequence,
) -> Result<ProcessSequence, ModelError> {
    for (v, x) in &d.explicit {
        if x.is_negative() {
            return Err(ModelError::NegativeEntry(tree.label(*v).to_string()));
        }
    }
    for ((fam, time), p) in &d.family {
        if !p.nonneg_on_members(tree.family(*fam).n0) {
            return Err(ModelError::NegativeEntry(format!(
                "{}@{}",
                tree.family(*fam).label,
                time
            )));
        }
    }
    Ok(ProcessSequence::new(
        (0..f.steps.len())
            .map(|j| {
                PayoffSpec::from_slots(tree, j, |s| {
                    let mut g = f.at(tree, 0, s);
                    for i in 0..j {
                        let w = d.at(tree.slot_ancestor(s, i));
                        let step = &f.at(tree, i + 1, s) - &f.at(tree, i, s);
                        g = &g + &(&w * &step);
                    }
                    g
                })
            })
            .collect(),
    ))
}
