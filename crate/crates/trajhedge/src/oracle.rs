//! Brute-force and duality oracles on finite explicit trees, independent of
//! the pricing engine.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::analysis::AnalysisReport;
use crate::lp::{LinearProgram, LpOutcome, Sense};
use crate::model::{HedgeSequence, ModelError, NodeId, PayoffSpec, SimpleStrategy, TrajectoryTree};
use crate::num::{fmt_q, Q};

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("oracles work on explicit trees only (family `{0}` present)")]
    HasFamilies(String),
    #[error("no martingale measure charges node `{0}`")]
    EmptyMeasureSet(String),
    #[error("grid: {0}")]
    BadGrid(String),
    #[error("linear program is {0}")]
    Lp(&'static str),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A one-step distribution: `(child, probability)` pairs with positive mass.
pub type LocalMeasure = Vec<(NodeId, Q)>;

/// Martingale measures on a finite explicit tree, in vertex form.
///
/// A node is *viable* when some mean-zero distribution on its viable children
/// exists (leaves are viable). Martingale measures are exactly the products of
/// local mean-zero distributions on viable children along the charged nodes,
/// so the set is nonempty iff the root is viable. The local polytopes
/// `{p ≥ 0, Σ p = 1, Σ p Δ = 0}` have vertices supported on one zero-increment
/// child or on one positive and one negative child.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeasureSet {
    pub root: NodeId,
    pub viable: BTreeSet<NodeId>,
    /// Vertices of the local polytope at every viable inner node.
    pub vertices: BTreeMap<NodeId, Vec<LocalMeasure>>,
}

impl MeasureSet {
    pub fn is_empty(&self) -> bool {
        !self.viable.contains(&self.root)
    }

    /// The measure as leaf probabilities when it is unique.
    pub fn unique(&self, tree: &TrajectoryTree) -> Option<Vec<(NodeId, Q)>> {
        if self.is_empty() {
            return None;
        }
        let mut out = Vec::new();
        let mut stack = vec![(self.root, Q::one())];
        while let Some((v, p)) = stack.pop() {
            if tree.is_leaf(v) {
                out.push((v, p));
                continue;
            }
            match self.vertices.get(&v).map(Vec::as_slice) {
                Some([only]) => {
                    for (c, q) in only {
                        stack.push((*c, &p * q));
                    }
                }
                _ => return None,
            }
        }
        out.sort();
        Some(out)
    }

    /// Number of product vertices over the nodes reachable from the root
    /// (saturating).
    pub fn vertex_count(&self, tree: &TrajectoryTree) -> u64 {
        fn count(ms: &MeasureSet, tree: &TrajectoryTree, v: NodeId) -> u64 {
            if tree.is_leaf(v) {
                return 1;
            }
            let mut total = 0u64;
            for m in ms.vertices.get(&v).into_iter().flatten() {
                let mut prod = 1u64;
                for (c, _) in m {
                    prod = prod.saturating_mul(count(ms, tree, *c));
                }
                total = total.saturating_add(prod);
            }
            total
        }
        if self.is_empty() {
            0
        } else {
            count(self, tree, self.root)
        }
    }
}

fn require_explicit(tree: &TrajectoryTree) -> Result<(), OracleError> {
    match tree.families().next() {
        Some(f) => Err(OracleError::HasFamilies(tree.family(f).label.clone())),
        None => Ok(()),
    }
}

/// Vertices of the local mean-zero polytope over the given children.
fn local_vertices(tree: &TrajectoryTree, children: &[NodeId]) -> Vec<LocalMeasure> {
    let mut out = Vec::new();
    for &c in children {
        if tree.node(c).increment.is_zero() {
            out.push(vec![(c, Q::one())]);
        }
    }
    for &a in children {
        let da = &tree.node(a).increment;
        if !da.is_positive() {
            continue;
        }
        for &b in children {
            let db = &tree.node(b).increment;
            if !db.is_negative() {
                continue;
            }
            let pa = -db / (da - db);
            let pb = &Q::one() - &pa;
            let mut m = vec![(a, pa), (b, pb)];
            m.sort();
            out.push(m);
        }
    }
    out
}

/// All martingale measures of the subtree at `node`, by per-node vertex
/// enumeration.
pub fn martingale_measures(tree: &TrajectoryTree, node: NodeId) -> Result<MeasureSet, OracleError> {
    require_explicit(tree)?;
    let mut viable = BTreeSet::new();
    let mut vertices = BTreeMap::new();
    // Children have larger ids than parents.
    let sub = tree.subtree(node);
    for &v in sub.iter().rev() {
        if tree.is_leaf(v) {
            viable.insert(v);
            continue;
        }
        let kids: Vec<NodeId> = tree
            .node(v)
            .children
            .iter()
            .copied()
            .filter(|c| viable.contains(c))
            .collect();
        let vs = local_vertices(tree, &kids);
        if !vs.is_empty() {
            viable.insert(v);
            vertices.insert(v, vs);
        }
    }
    Ok(MeasureSet {
        root: node,
        viable,
        vertices,
    })
}

/// `sup_Q E_Q[f]` over martingale measures of the subtree at `node`: a
/// backward maximum over local vertices.
pub fn dual_price(tree: &TrajectoryTree, f: &PayoffSpec, node: NodeId) -> Result<Q, OracleError> {
    f.validate(tree)?;
    let ms = martingale_measures(tree, node)?;
    if ms.is_empty() {
        return Err(OracleError::EmptyMeasureSet(tree.label(node).to_string()));
    }
    let mut val: BTreeMap<NodeId, Q> = BTreeMap::new();
    for &v in tree.subtree(node).iter().rev() {
        if !ms.viable.contains(&v) {
            continue;
        }
        let x = if tree.node(v).time >= f.maturity || tree.is_leaf(v) {
            f.at_node(tree, v)
        } else {
            ms.vertices[&v]
                .iter()
                .map(|m| m.iter().map(|(c, p)| p * &val[c]).fold(Q::zero(), |a, b| a + b))
                .max()
                .expect("viable inner node has a vertex")
        };
        val.insert(v, x);
    }
    Ok(val.remove(&node).expect("root is viable"))
}

/// Result of [`grid_superhedge`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridResult {
    pub value: Q,
    pub strategy: SimpleStrategy,
}

/// Backward search over hedges in `{−bound, −bound + step, …, bound}`: an
/// upper bound on the superhedging price that tightens as the grid refines.
pub fn grid_superhedge(
    tree: &TrajectoryTree,
    f: &PayoffSpec,
    node: NodeId,
    bound: &Q,
    step: &Q,
) -> Result<GridResult, OracleError> {
    require_explicit(tree)?;
    f.validate(tree)?;
    if !step.is_positive() || bound.is_negative() {
        return Err(OracleError::BadGrid(format!(
            "step {} bound {}",
            fmt_q(step),
            fmt_q(bound)
        )));
    }
    let count = (bound / step).floor().to_integer();
    let grid: Vec<Q> = {
        let n: i64 = count
            .try_into()
            .map_err(|_| OracleError::BadGrid("too many grid points".into()))?;
        if n > 100_000 {
            return Err(OracleError::BadGrid("too many grid points".into()));
        }
        (-n..=n).map(|k| step * Q::from_integer(k.into())).collect()
    };
    let mut val: BTreeMap<NodeId, Q> = BTreeMap::new();
    let mut hedge = HedgeSequence::new();
    for &v in tree.subtree(node).iter().rev() {
        if tree.node(v).time >= f.maturity || tree.is_leaf(v) {
            val.insert(v, f.at_node(tree, v));
            continue;
        }
        let kids = &tree.node(v).children;
        let mut best: Option<(Q, Q)> = None;
        for h in &grid {
            let worst = kids
                .iter()
                .map(|c| &val[c] - &(h * &tree.node(*c).increment))
                .max()
                .expect("inner node has children");
            let better = match &best {
                None => true,
                Some((b, bh)) => worst < *b || (worst == *b && h.abs() < bh.abs()),
            };
            if better {
                best = Some((worst, h.clone()));
            }
        }
        let (x, h) = best.expect("grid is nonempty");
        if !h.is_zero() {
            hedge.explicit.insert(v, h);
        }
        val.insert(v, x);
    }
    Ok(GridResult {
        value: val[&node].clone(),
        strategy: SimpleStrategy {
            initial_capital: val[&node].clone(),
            hedge,
            start_time: tree.node(node).time,
        },
    })
}

/// `Ī f` at `node` on an explicit tree as one coupled linear program: the
/// least capital of a single portfolio whose wealth stays nonnegative at every
/// node of the subtree and dominates `f ≥ 0` at maturity off the null cover.
pub fn coupled_i_bar(
    tree: &TrajectoryTree,
    report: &AnalysisReport,
    f: &PayoffSpec,
    node: NodeId,
) -> Result<Q, OracleError> {
    require_explicit(tree)?;
    f.validate(tree)?;
    let mut lp = LinearProgram::new();
    let capital = lp.var(Q::one(), true);
    let sub = tree.subtree(node);
    let mut hvar: BTreeMap<NodeId, usize> = BTreeMap::new();
    for &v in &sub {
        if !tree.is_leaf(v) && tree.node(v).time < f.maturity.max(tree.node(node).time + 1) {
            hvar.insert(v, lp.var(Q::zero(), true));
        }
    }
    let start = tree.node(node).time;
    for &v in &sub {
        let t = tree.node(v).time;
        if t > f.maturity.max(start) {
            continue;
        }
        // Wealth at v as a linear form.
        let mut terms = vec![(capital, Q::one())];
        let path = tree.path(v);
        for w in path.windows(2) {
            if tree.node(w[0]).time < start {
                continue;
            }
            if let Some(&h) = hvar.get(&w[0]) {
                terms.push((h, tree.node(w[1]).increment.clone()));
            }
        }
        let dominated = t == f.maturity.max(start) && !report.negligible(tree, v);
        let rhs = if dominated { f.at_node(tree, v) } else { Q::zero() };
        lp.constraint(terms, Sense::Ge, rhs);
    }
    match lp.solve() {
        LpOutcome::Optimal { value, .. } => Ok(value),
        LpOutcome::Infeasible => Err(OracleError::Lp("infeasible")),
        LpOutcome::Unbounded => Err(OracleError::Lp("unbounded")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::TrajectoryTree;
    use crate::num::{q, qi};

    fn binary(depth: usize) -> TrajectoryTree {
        let mut b = TrajectoryTree::builder(qi(0), depth);
        b.node("r", 0);
        let mut level = vec!["r".to_string()];
        for t in 1..=depth {
            let mut next = Vec::new();
            for p in &level {
                for (s, inc) in [("u", 1), ("d", -1)] {
                    let c = format!("{p}{s}");
                    b.node(&c, t);
                    b.child(p, qi(inc), &c);
                    next.push(c);
                }
            }
            level = next;
        }
        b.finish().unwrap()
    }

    #[test]
    fn symmetric_binary_measure_is_unique() {
        let t = binary(2);
        let ms = martingale_measures(&t, t.root()).unwrap();
        let m = ms.unique(&t).unwrap();
        assert_eq!(m.len(), 4);
        assert!(m.iter().all(|(_, p)| *p == q(1, 4)));
        for vs in ms.vertices.values() {
            assert_eq!(vs, &vec![vs[0].clone()]);
            assert!(vs[0].iter().all(|(_, p)| *p == q(1, 2)));
        }
    }

    #[test]
    fn trinomial_vertices() {
        let t = TrajectoryTree::builder(qi(0), 1)
            .node("r", 0)
            .node("a", 1)
            .node("b", 1)
            .node("c", 1)
            .child("r", qi(2), "a")
            .child("r", qi(1), "b")
            .child("r", qi(-1), "c")
            .finish()
            .unwrap();
        let ms = martingale_measures(&t, t.root()).unwrap();
        let vs = &ms.vertices[&t.root()];
        assert_eq!(vs.len(), 2);
        let (a, b, c) = (
            t.node_id("a").unwrap(),
            t.node_id("b").unwrap(),
            t.node_id("c").unwrap(),
        );
        assert!(vs.contains(&vec![(a, q(1, 3)), (c, q(2, 3))]));
        assert!(vs.contains(&vec![(b, q(1, 2)), (c, q(1, 2))]));
        // (S_1 − S_0)_+ : max(2/3, 1/2).
        let f = PayoffSpec::from_fns(&t, 1, |v| t.node(v).increment.clone().max(qi(0)), |_| unreachable!());
        assert_eq!(dual_price(&t, &f, t.root()).unwrap(), q(2, 3));
        assert_eq!(
            grid_superhedge(&t, &f, t.root(), &qi(2), &q(1, 3)).unwrap().value,
            q(2, 3)
        );
    }

    #[test]
    fn two_children_grid() {
        let t = binary(1);
        let f = PayoffSpec::from_fns(
            &t,
            1,
            |v| if t.label(v) == "ru" { qi(2) } else { qi(0) },
            |_| unreachable!(),
        );
        let g = grid_superhedge(&t, &f, t.root(), &qi(4), &q(1, 8)).unwrap();
        assert_eq!(g.value, qi(1));
        assert_eq!(g.strategy.hedge.explicit[&t.root()], qi(1));
        assert_eq!(dual_price(&t, &f, t.root()).unwrap(), qi(1));
        let c = PayoffSpec::constant(&t, 1, q(7, 3));
        assert_eq!(
            grid_superhedge(&t, &c, t.root(), &qi(1), &q(1, 2)).unwrap().value,
            q(7, 3)
        );
        assert_eq!(dual_price(&t, &c, t.root()).unwrap(), q(7, 3));
    }

    #[test]
    fn arbitrage_free_branch_keeps_measures() {
        // A type II node next to viable up and down siblings: martingale
        // measures exist and simply do not charge it.
        let t = TrajectoryTree::builder(qi(0), 2)
            .node("r", 0)
            .node("a", 1)
            .node("b", 1)
            .node("x", 1)
            .node("x1", 2)
            .node("x2", 2)
            .node("a2", 2)
            .node("b2", 2)
            .child("a", qi(0), "a2")
            .child("b", qi(0), "b2")
            .child("r", qi(1), "a")
            .child("r", qi(-1), "b")
            .child("r", qi(0), "x")
            .child("x", qi(1), "x1")
            .child("x", qi(2), "x2")
            .finish()
            .unwrap();
        let ms = martingale_measures(&t, t.root()).unwrap();
        assert!(!ms.is_empty());
        assert!(!ms.viable.contains(&t.node_id("x").unwrap()));
        assert_eq!(ms.vertex_count(&t), 1);
    }
}
