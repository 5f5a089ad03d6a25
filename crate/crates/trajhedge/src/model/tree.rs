//! Finite-horizon trajectory trees with explicit and parametric branching.

use std::collections::{BTreeMap, HashMap};

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::model::ModelError;
use crate::num::{fmt_q, Q};
use crate::poly::Poly;

/// Index of an explicit node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct NodeId(pub usize);

/// Index of a countable branch family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct FamilyId(pub usize);

/// An explicit node `(S, j)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub label: String,
    pub time: usize,
    pub value: Q,
    pub parent: Option<NodeId>,
    /// Increment from the parent (zero at the root).
    pub increment: Q,
    pub children: Vec<NodeId>,
    pub families: Vec<FamilyId>,
    /// Unbounded-constancy tail: from this leaf the price may stay put at
    /// every later date or jump by this amount and stop; the ever-constant
    /// path itself is excluded. Such sets are trajectorially incomplete.
    pub recurrence: Option<Q>,
}

/// A countable family of children of `parent` with increments `p(1/n)`,
/// `n ≥ n0`, each followed by constant continuation until the horizon.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Family {
    pub label: String,
    pub parent: NodeId,
    pub increment: Poly,
    pub n0: u64,
}

/// A child of an explicit node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum ChildRef {
    Node(NodeId),
    Family(FamilyId),
}

/// A position in the tree at a given date: an explicit node, or the common
/// position of all members of a family at some date after the branching.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Slot {
    Node(NodeId),
    Family { family: FamilyId, time: usize },
}

/// The end of one trajectory (or, for families, of one member).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Endpoint {
    Leaf(NodeId),
    Member { family: FamilyId, n: u64 },
}

/// Rooted tree representing a trajectory set whose paths are constant from a
/// common horizon `T` on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrajectoryTree {
    root_value: Q,
    horizon: usize,
    nodes: Vec<Node>,
    families: Vec<Family>,
    node_labels: HashMap<String, NodeId>,
    family_labels: HashMap<String, FamilyId>,
}

/// Incremental constructor; [`TreeBuilder::finish`] validates every invariant.
#[derive(Clone, Debug)]
pub struct TreeBuilder {
    root_value: Q,
    horizon: usize,
    nodes: Vec<(String, usize)>,
    edges: Vec<(String, Q, String)>,
    families: Vec<(String, Poly, u64, Option<String>)>,
    recurrences: Vec<(String, Q)>,
}

impl TreeBuilder {
    pub fn new(root_value: Q, horizon: usize) -> Self {
        TreeBuilder {
            root_value,
            horizon,
            nodes: Vec::new(),
            edges: Vec::new(),
            families: Vec::new(),
            recurrences: Vec::new(),
        }
    }

    /// Declares a node with a label and a date.
    pub fn node(&mut self, label: &str, time: usize) -> &mut Self {
        self.nodes.push((label.to_string(), time));
        self
    }

    /// Declares an explicit child edge.
    pub fn child(&mut self, parent: &str, increment: Q, child: &str) -> &mut Self {
        self.edges.push((parent.to_string(), increment, child.to_string()));
        self
    }

    /// Declares a family child; `label` defaults to `<parent>.f<k>`.
    pub fn family(&mut self, parent: &str, increment: Poly, n0: u64, label: Option<&str>) -> &mut Self {
        self.families
            .push((parent.to_string(), increment, n0, label.map(str::to_string)));
        self
    }

    /// Declares an unbounded-constancy tail at a leaf.
    pub fn recur(&mut self, node: &str, jump: Q) -> &mut Self {
        self.recurrences.push((node.to_string(), jump));
        self
    }

    pub fn finish(&self) -> Result<TrajectoryTree, ModelError> {
        let mut node_labels = HashMap::new();
        let mut nodes: Vec<Node> = Vec::new();
        for (label, time) in &self.nodes {
            if node_labels.insert(label.clone(), NodeId(nodes.len())).is_some() {
                return Err(ModelError::Invalid(format!("node `{label}` declared twice")));
            }
            if *time > self.horizon {
                return Err(ModelError::HorizonMismatch(format!(
                    "node `{label}` has t={time} beyond horizon {}",
                    self.horizon
                )));
            }
            nodes.push(Node {
                label: label.clone(),
                time: *time,
                value: Q::zero(),
                parent: None,
                increment: Q::zero(),
                children: Vec::new(),
                families: Vec::new(),
                recurrence: None,
            });
        }
        let lookup = |l: &str| -> Result<NodeId, ModelError> {
            node_labels
                .get(l)
                .copied()
                .ok_or_else(|| ModelError::UnknownNode(l.to_string()))
        };
        let roots: Vec<usize> = (0..nodes.len()).filter(|&i| nodes[i].time == 0).collect();
        if roots.len() != 1 {
            return Err(ModelError::Invalid(format!(
                "expected exactly one node with t=0, found {}",
                roots.len()
            )));
        }
        for (p, inc, c) in &self.edges {
            let (pi, ci) = (lookup(p)?, lookup(c)?);
            if nodes[ci.0].parent.is_some() || ci.0 == roots[0] {
                return Err(ModelError::Invalid(format!("node `{c}` has more than one parent")));
            }
            if nodes[ci.0].time != nodes[pi.0].time + 1 {
                return Err(ModelError::HorizonMismatch(format!(
                    "child `{c}` (t={}) of `{p}` (t={}) is not one period later",
                    nodes[ci.0].time, nodes[pi.0].time
                )));
            }
            nodes[ci.0].parent = Some(pi);
            nodes[ci.0].increment = inc.clone();
            nodes[pi.0].children.push(ci);
        }
        let mut families = Vec::new();
        let mut family_labels = HashMap::new();
        for (p, poly, n0, label) in &self.families {
            let pi = lookup(p)?;
            let k = nodes[pi.0].families.len();
            let label = label.clone().unwrap_or_else(|| format!("{p}.f{k}"));
            if let Some(d) = poly.degree() {
                if d > 4 {
                    return Err(ModelError::FamilyDegree {
                        family: label,
                        degree: d,
                    });
                }
            }
            if *n0 < 1 {
                return Err(ModelError::Invalid(format!("family `{label}` needs n0 ≥ 1")));
            }
            if poly.is_constant() {
                return Err(ModelError::Invalid(format!(
                    "family `{label}` has a constant increment; its members would coincide"
                )));
            }
            if nodes[pi.0].time >= self.horizon {
                return Err(ModelError::HorizonMismatch(format!(
                    "family `{label}` branches at the horizon"
                )));
            }
            let id = FamilyId(families.len());
            if family_labels.insert(label.clone(), id).is_some() {
                return Err(ModelError::Invalid(format!("family `{label}` declared twice")));
            }
            nodes[pi.0].families.push(id);
            families.push(Family {
                label,
                parent: pi,
                increment: poly.clone(),
                n0: *n0,
            });
        }
        for (l, jump) in &self.recurrences {
            let v = lookup(l)?;
            if jump.is_zero() {
                return Err(ModelError::Invalid(format!("recurrence at `{l}` needs a nonzero jump")));
            }
            nodes[v.0].recurrence = Some(jump.clone());
        }
        let mut tree = TrajectoryTree {
            root_value: self.root_value.clone(),
            horizon: self.horizon,
            nodes,
            families,
            node_labels,
            family_labels,
        };
        tree.fill_values(NodeId(roots[0]))?;
        tree.validate()?;
        Ok(tree)
    }
}

impl TrajectoryTree {
    pub fn builder(root_value: Q, horizon: usize) -> TreeBuilder {
        TreeBuilder::new(root_value, horizon)
    }

    /// Reorders nodes so that the root is index 0 and ids follow a pre-order
    /// walk, then computes node values from increments.
    fn fill_values(&mut self, root: NodeId) -> Result<(), ModelError> {
        let mut order = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            order.push(v);
            for c in self.nodes[v.0].children.iter().rev() {
                stack.push(*c);
            }
        }
        if order.len() != self.nodes.len() {
            let missing = (0..self.nodes.len())
                .find(|i| !order.contains(&NodeId(*i)))
                .map(|i| self.nodes[i].label.clone())
                .unwrap_or_default();
            return Err(ModelError::Invalid(format!(
                "node `{missing}` is not reachable from the root"
            )));
        }
        let mut new_index = vec![0usize; self.nodes.len()];
        for (new, old) in order.iter().enumerate() {
            new_index[old.0] = new;
        }
        let remap = |v: NodeId| NodeId(new_index[v.0]);
        let mut nodes: Vec<Node> = order.iter().map(|v| self.nodes[v.0].clone()).collect();
        for n in nodes.iter_mut() {
            n.parent = n.parent.map(remap);
            n.children = n.children.iter().map(|c| remap(*c)).collect();
        }
        for f in self.families.iter_mut() {
            f.parent = remap(f.parent);
        }
        for id in self.node_labels.values_mut() {
            *id = remap(*id);
        }
        nodes[0].value = self.root_value.clone();
        for i in 1..nodes.len() {
            let p = nodes[i].parent.expect("non-root nodes have parents").0;
            nodes[i].value = &nodes[p].value + &nodes[i].increment;
        }
        self.nodes = nodes;
        Ok(())
    }

    fn validate(&self) -> Result<(), ModelError> {
        for (i, n) in self.nodes.iter().enumerate() {
            let v = NodeId(i);
            let has_children = !n.children.is_empty() || !n.families.is_empty();
            if n.time < self.horizon && !has_children {
                return Err(ModelError::HorizonMismatch(format!(
                    "node `{}` at t={} ends before the horizon {}",
                    n.label, n.time, self.horizon
                )));
            }
            if n.time == self.horizon && has_children {
                return Err(ModelError::HorizonMismatch(format!(
                    "node `{}` branches at the horizon",
                    n.label
                )));
            }
            if n.recurrence.is_some() && n.time != self.horizon {
                return Err(ModelError::HorizonMismatch(format!(
                    "recurrence at `{}` must sit on a horizon leaf",
                    n.label
                )));
            }
            let incs: Vec<&Q> = n.children.iter().map(|c| &self.nodes[c.0].increment).collect();
            for (a, x) in incs.iter().enumerate() {
                if incs[..a].contains(x) {
                    return Err(ModelError::DuplicateIncrement {
                        node: n.label.clone(),
                        increment: fmt_q(x),
                    });
                }
            }
            for &fid in &n.families {
                let fam = &self.families[fid.0];
                for x in &incs {
                    if let Some(m) = fam.increment.members_equal(x, fam.n0).first() {
                        return Err(ModelError::DuplicateIncrement {
                            node: n.label.clone(),
                            increment: format!("{} (family `{}` member n={m})", fmt_q(x), fam.label),
                        });
                    }
                }
                self.check_family_injective(fam)?;
            }
            for (a, fa) in n.families.iter().enumerate() {
                for fb in &n.families[..a] {
                    self.check_families_disjoint(v, *fa, *fb)?;
                }
            }
        }
        Ok(())
    }

    /// Members of one family must have pairwise distinct increments.
    fn check_family_injective(&self, fam: &Family) -> Result<(), ModelError> {
        let p = &fam.increment;
        // Beyond the smallest positive critical point the increment is strictly
        // monotone in t, so only members up to that index can collide.
        let df = p.derivative();
        let crit: Vec<f64> = crate::poly::real_roots(
            &df.coeffs().iter().map(crate::num::to_f64).collect::<Vec<_>>(),
            0.0,
            1.0 / fam.n0 as f64,
        )
        .into_iter()
        .filter(|r| *r > 0.0)
        .collect();
        let Some(rmin) = crit.iter().cloned().reduce(f64::min) else {
            return Ok(());
        };
        let last = ((1.0 / rmin).ceil() as u64).saturating_add(1);
        if last > 100_000 {
            return Err(ModelError::Invalid(format!(
                "family `{}` oscillates too far out (critical member ~{last}); split it explicitly",
                fam.label
            )));
        }
        for n in fam.n0..=last.max(fam.n0) {
            let v = p.at_member(n);
            if let Some(m) = p.members_equal(&v, fam.n0).into_iter().find(|&m| m != n) {
                return Err(ModelError::DuplicateIncrement {
                    node: self.nodes[fam.parent.0].label.clone(),
                    increment: format!("{} (family `{}` members n={n} and n={m})", fmt_q(&v), fam.label),
                });
            }
        }
        Ok(())
    }

    /// Sibling families must have separated increment ranges.
    fn check_families_disjoint(&self, v: NodeId, a: FamilyId, b: FamilyId) -> Result<(), ModelError> {
        let fa = &self.families[a.0];
        let fb = &self.families[b.0];
        let separated = |lo: &Family, hi: &Family| {
            let s = lo.increment.sup_members(lo.n0);
            let i = hi.increment.inf_members(hi.n0);
            s.value < i.value || (s.value == i.value && (s.attained_at.is_none() || i.attained_at.is_none()))
        };
        if separated(fa, fb) || separated(fb, fa) {
            Ok(())
        } else {
            Err(ModelError::Invalid(format!(
                "families `{}` and `{}` at `{}` have overlapping increment ranges",
                fa.label, fb.label, self.nodes[v.0].label
            )))
        }
    }

    pub fn root(&self) -> NodeId {
        NodeId(0)
    }

    pub fn root_value(&self) -> &Q {
        &self.root_value
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn node(&self, v: NodeId) -> &Node {
        &self.nodes[v.0]
    }

    pub fn family(&self, f: FamilyId) -> &Family {
        &self.families[f.0]
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.nodes.len()).map(NodeId)
    }

    pub fn families(&self) -> impl Iterator<Item = FamilyId> + '_ {
        (0..self.families.len()).map(FamilyId)
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_families(&self) -> usize {
        self.families.len()
    }

    pub fn node_id(&self, label: &str) -> Result<NodeId, ModelError> {
        self.node_labels
            .get(label)
            .copied()
            .ok_or_else(|| ModelError::UnknownNode(label.to_string()))
    }

    pub fn family_id(&self, label: &str) -> Result<FamilyId, ModelError> {
        self.family_labels
            .get(label)
            .copied()
            .ok_or_else(|| ModelError::UnknownFamily(label.to_string()))
    }

    pub fn label(&self, v: NodeId) -> &str {
        &self.nodes[v.0].label
    }

    /// Explicit children first, then families, in declaration order.
    pub fn children(&self, v: NodeId) -> Vec<ChildRef> {
        let n = &self.nodes[v.0];
        n.children
            .iter()
            .map(|c| ChildRef::Node(*c))
            .chain(n.families.iter().map(|f| ChildRef::Family(*f)))
            .collect()
    }

    pub fn is_leaf(&self, v: NodeId) -> bool {
        self.nodes[v.0].time == self.horizon
    }

    /// Whether every trajectory is constant from the horizon on (no
    /// unbounded-constancy tails), which makes the set trajectorially complete.
    pub fn is_complete(&self) -> bool {
        self.nodes.iter().all(|n| n.recurrence.is_none())
    }

    pub fn has_families(&self) -> bool {
        !self.families.is_empty()
    }

    /// Explicit nodes at date `time`, in id order.
    pub fn nodes_at(&self, time: usize) -> Vec<NodeId> {
        self.nodes().filter(|v| self.nodes[v.0].time == time).collect()
    }

    /// Families whose members occupy positions at date `time`.
    pub fn families_at(&self, time: usize) -> Vec<FamilyId> {
        self.families()
            .filter(|f| {
                let pt = self.nodes[self.families[f.0].parent.0].time;
                pt < time && time <= self.horizon
            })
            .collect()
    }

    /// Every position at date `time`.
    pub fn slots_at(&self, time: usize) -> Vec<Slot> {
        self.nodes_at(time)
            .into_iter()
            .map(Slot::Node)
            .chain(
                self.families_at(time)
                    .into_iter()
                    .map(|family| Slot::Family { family, time }),
            )
            .collect()
    }

    pub fn slot_time(&self, s: Slot) -> usize {
        match s {
            Slot::Node(v) => self.nodes[v.0].time,
            Slot::Family { time, .. } => time,
        }
    }

    /// Date at which the members of a family first appear.
    pub fn family_time(&self, f: FamilyId) -> usize {
        self.nodes[self.families[f.0].parent.0].time + 1
    }

    /// Path of explicit nodes from the root to `v` (inclusive).
    pub fn path(&self, v: NodeId) -> Vec<NodeId> {
        let mut out = vec![v];
        let mut cur = v;
        while let Some(p) = self.nodes[cur.0].parent {
            out.push(p);
            cur = p;
        }
        out.reverse();
        out
    }

    /// Ancestor of `v` at date `time ≤ time(v)`.
    pub fn ancestor_at(&self, v: NodeId, time: usize) -> NodeId {
        let mut cur = v;
        while self.nodes[cur.0].time > time {
            cur = self.nodes[cur.0].parent.expect("walk stops at the root");
        }
        cur
    }

    /// Whether `a` is an ancestor of (or equal to) `b`.
    pub fn is_ancestor(&self, a: NodeId, b: NodeId) -> bool {
        let ta = self.nodes[a.0].time;
        self.nodes[b.0].time >= ta && self.ancestor_at(b, ta) == a
    }

    /// Position of a slot's trajectory at an earlier date.
    pub fn slot_ancestor(&self, s: Slot, time: usize) -> Slot {
        match s {
            Slot::Node(v) => Slot::Node(self.ancestor_at(v, time)),
            Slot::Family { family, time: t } => {
                let ft = self.family_time(family);
                if time >= ft {
                    Slot::Family {
                        family,
                        time: time.min(t),
                    }
                } else {
                    Slot::Node(self.ancestor_at(self.families[family.0].parent, time))
                }
            }
        }
    }

    /// Explicit nodes of the subtree rooted at `v`, in id (pre-)order.
    pub fn subtree(&self, v: NodeId) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            out.push(u);
            for c in self.nodes[u.0].children.iter().rev() {
                stack.push(*c);
            }
        }
        out
    }

    /// Families hanging anywhere in the subtree of `v`.
    pub fn subtree_families(&self, v: NodeId) -> Vec<FamilyId> {
        self.subtree(v)
            .into_iter()
            .flat_map(|u| self.nodes[u.0].families.clone())
            .collect()
    }

    /// Price of every member of `f` as a polynomial in `t`.
    pub fn family_value(&self, f: FamilyId) -> Poly {
        let fam = &self.families[f.0];
        &Poly::constant(self.nodes[fam.parent.0].value.clone()) + &fam.increment
    }

    /// Trajectory endpoints below `v`; families contribute their first
    /// `sample` members plus every member with a zero increment.
    pub fn endpoints(&self, v: NodeId, sample: u64) -> Vec<Endpoint> {
        let mut out = Vec::new();
        for u in self.subtree(v) {
            if self.is_leaf(u) {
                out.push(Endpoint::Leaf(u));
            }
            for &f in &self.nodes[u.0].families {
                let fam = &self.families[f.0];
                let mut ns: Vec<u64> = (fam.n0..fam.n0 + sample).collect();
                ns.extend(fam.increment.zero_members(fam.n0));
                ns.sort_unstable();
                ns.dedup();
                out.extend(ns.into_iter().map(|n| Endpoint::Member { family: f, n }));
            }
        }
        out
    }

    /// Increment of a child.
    pub fn child_increment_poly(&self, c: ChildRef) -> Poly {
        match c {
            ChildRef::Node(u) => Poly::constant(self.nodes[u.0].increment.clone()),
            ChildRef::Family(f) => self.families[f.0].increment.clone(),
        }
    }

    /// Returns a copy where members `n0 .. k-1` of `f` become explicit
    /// children (with constant continuation chains) and the family starts at
    /// `k`. Existing node and family ids are preserved; new nodes are appended.
    pub fn split_family(&self, f: FamilyId, k: u64) -> Result<TrajectoryTree, ModelError> {
        let fam = self.families[f.0].clone();
        if k <= fam.n0 {
            return Ok(self.clone());
        }
        let mut t = self.clone();
        let parent_time = self.nodes[fam.parent.0].time;
        for n in fam.n0..k {
            let inc = fam.increment.at_member(n);
            let mut prev = fam.parent;
            for time in parent_time + 1..=self.horizon {
                let id = NodeId(t.nodes.len());
                let label = format!("{}#{}@{}", fam.label, n, time);
                let increment = if time == parent_time + 1 {
                    inc.clone()
                } else {
                    Q::zero()
                };
                let value = &t.nodes[prev.0].value + &increment;
                t.nodes.push(Node {
                    label: label.clone(),
                    time,
                    value,
                    parent: Some(prev),
                    increment,
                    children: Vec::new(),
                    families: Vec::new(),
                    recurrence: None,
                });
                t.nodes[prev.0].children.push(id);
                t.node_labels.insert(label, id);
                prev = id;
            }
        }
        t.families[f.0].n0 = k;
        Ok(t)
    }

    /// The explicit node created by [`TrajectoryTree::split_family`] for
    /// member `n` at date `time`.
    pub fn split_member_node(&self, f: FamilyId, n: u64, time: usize) -> Option<NodeId> {
        let label = format!("{}#{}@{}", self.families[f.0].label, n, time);
        self.node_labels.get(&label).copied()
    }

    /// For a node created by [`TrajectoryTree::split_family`], the family and
    /// member it stands for.
    pub fn member_origin(&self, v: NodeId) -> Option<(FamilyId, u64)> {
        let label = &self.nodes[v.0].label;
        let (fam, rest) = label.split_once('#')?;
        let (n, _) = rest.split_once('@')?;
        Some((*self.family_labels.get(fam)?, n.parse().ok()?))
    }

    /// Explicit-only truncation: each family is replaced by its first `keep`
    /// members (plus zero-increment members) as explicit children.
    pub fn explicit_reduction(&self, keep: u64) -> Result<TrajectoryTree, ModelError> {
        let mut t = self.clone();
        for f in self.families() {
            let fam = &self.families[f.0];
            let mut ns: Vec<u64> = (fam.n0..fam.n0 + keep).collect();
            ns.extend(fam.increment.zero_members(fam.n0));
            let last = *ns.iter().max().expect("keep ≥ 1");
            t = t.split_family(f, last + 1)?;
            // Drop split members that are not kept.
            let drop: Vec<u64> = (fam.n0..=last).filter(|n| !ns.contains(n)).collect();
            for n in drop {
                let first = t
                    .split_member_node(f, n, self.family_time(f))
                    .expect("member was split");
                t.remove_subtree(first);
            }
        }
        // Remove the (now residual) families.
        for n in t.nodes.iter_mut() {
            n.families.clear();
        }
        t.families.clear();
        t.family_labels.clear();
        t.renumber()
    }

    fn remove_subtree(&mut self, v: NodeId) {
        if let Some(p) = self.nodes[v.0].parent {
            self.nodes[p.0].children.retain(|c| *c != v);
        }
        self.nodes[v.0].parent = None;
        self.nodes[v.0].time = usize::MAX; // tombstone
    }

    fn renumber(&self) -> Result<TrajectoryTree, ModelError> {
        let mut b = TreeBuilder::new(self.root_value.clone(), self.horizon);
        for n in self.nodes.iter().filter(|n| n.time != usize::MAX) {
            b.node(&n.label, n.time);
        }
        for n in self.nodes.iter().filter(|n| n.time != usize::MAX) {
            for c in &n.children {
                let cn = &self.nodes[c.0];
                b.child(&n.label, cn.increment.clone(), &cn.label);
            }
        }
        for f in &self.families {
            b.family(&self.nodes[f.parent.0].label, f.increment.clone(), f.n0, Some(&f.label));
        }
        for n in self.nodes.iter().filter(|n| n.time != usize::MAX) {
            if let Some(j) = &n.recurrence {
                b.recur(&n.label, j.clone());
            }
        }
        b.finish()
    }

    /// Sign summary of a child's increments.
    pub fn child_signs(&self, c: ChildRef) -> ChildSigns {
        match c {
            ChildRef::Node(u) => {
                let x = &self.nodes[u.0].increment;
                ChildSigns {
                    positive: x.is_positive(),
                    negative: x.is_negative(),
                    zero: x.is_zero(),
                }
            }
            ChildRef::Family(f) => {
                let fam = &self.families[f.0];
                ChildSigns {
                    positive: fam.increment.has_positive_member(fam.n0),
                    negative: fam.increment.has_negative_member(fam.n0),
                    zero: !fam.increment.zero_members(fam.n0).is_empty(),
                }
            }
        }
    }

    /// Short human description of a child.
    pub fn describe_child(&self, c: ChildRef) -> String {
        match c {
            ChildRef::Node(u) => self.nodes[u.0].label.clone(),
            ChildRef::Family(f) => format!("family {}", self.families[f.0].label),
        }
    }

    /// Short human description of a slot.
    pub fn describe_slot(&self, s: Slot) -> String {
        match s {
            Slot::Node(v) => self.nodes[v.0].label.clone(),
            Slot::Family { family, time } => format!("{}@{}", self.families[family.0].label, time),
        }
    }

    /// Labels of all nodes, keyed by id (for deterministic reports).
    pub fn labels(&self) -> BTreeMap<NodeId, String> {
        self.nodes().map(|v| (v, self.nodes[v.0].label.clone())).collect()
    }
}

/// Which signs a child's increments take (attained values only).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ChildSigns {
    pub positive: bool,
    pub negative: bool,
    pub zero: bool,
}
