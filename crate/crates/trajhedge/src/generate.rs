//! Seeded random instances for the property suites.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::analysis::AnalysisReport;
use crate::model::{PayoffSpec, ProcessSequence, Slot, TrajectoryTree, TreeBuilder};
use crate::num::{q, Q};
use crate::poly::Poly;
use crate::pricing::{sigma_bar, PricingConfig, PricingError};

/// Shape of a random explicit tree.
#[derive(Clone, Copy, Debug)]
pub struct TreeShape {
    /// Horizon (every leaf sits at this date).
    pub depth: usize,
    /// Maximal number of children per node.
    pub branching: usize,
    /// Only up-down and flat nodes.
    pub arbitrage_free: bool,
}

/// Explicit increments are drawn from `k/4`, `1 ≤ |k| ≤ 8`; family
/// increments use sevenths, so they never coincide with explicit ones.
fn quarter(k: i64) -> Q {
    q(k, 4)
}

/// `count` distinct increments with the requested signs.
fn increments<R: Rng>(rng: &mut R, count: usize, need_pos: bool, need_neg: bool, allow: (bool, bool, bool)) -> Vec<Q> {
    let (pos, neg, zero) = allow;
    let mut pool: Vec<i64> = Vec::new();
    if pos {
        pool.extend(1..=8);
    }
    if neg {
        pool.extend(-8..=-1);
    }
    if zero {
        pool.push(0);
    }
    loop {
        let mut ks: Vec<i64> = pool.choose_multiple(rng, count.min(pool.len())).copied().collect();
        ks.sort();
        let has_pos = ks.iter().any(|k| *k > 0);
        let has_neg = ks.iter().any(|k| *k < 0);
        if (!need_pos || has_pos) && (!need_neg || has_neg) {
            return ks.into_iter().map(quarter).collect();
        }
    }
}

struct Gen {
    b: TreeBuilder,
    next: usize,
}

impl Gen {
    fn new(depth: usize) -> Self {
        let mut b = TrajectoryTree::builder(q(1, 1), depth);
        b.node("r", 0);
        Gen { b, next: 0 }
    }

    fn child(&mut self, parent: &str, inc: Q, time: usize) -> String {
        self.next += 1;
        let label = format!("n{}", self.next);
        self.b.node(&label, time);
        self.b.child(parent, inc, &label);
        label
    }

    /// A constant chain from `label` (at `time`) down to the horizon.
    fn flat_chain(&mut self, label: &str, time: usize, horizon: usize) {
        let mut cur = label.to_string();
        for t in time + 1..=horizon {
            cur = self.child(&cur, Q::from_integer(0.into()), t);
        }
    }

    /// A random subtree below `label`.
    fn grow<R: Rng>(&mut self, rng: &mut R, label: &str, time: usize, shape: &TreeShape) {
        if time == shape.depth {
            return;
        }
        let incs = if rng.gen_bool(0.15) {
            vec![Q::from_integer(0.into())]
        } else if shape.arbitrage_free || rng.gen_bool(0.7) {
            let n = rng.gen_range(2..=shape.branching.max(2));
            increments(rng, n, true, true, (true, true, true))
        } else {
            // Arbitrage node: one-signed increments, possibly with a zero.
            let n = rng.gen_range(1..=shape.branching.max(1));
            let up = rng.gen_bool(0.5);
            let zero = rng.gen_bool(0.5);
            let mut v = increments(rng, n, up, !up, (up, !up, false));
            if zero {
                v.push(Q::from_integer(0.into()));
            }
            v
        };
        for inc in incs {
            let c = self.child(label, inc, time + 1);
            self.grow(rng, &c, time + 1, shape);
        }
    }

    fn finish(&self) -> TrajectoryTree {
        self.b.finish().expect("generated tree is well formed")
    }
}

/// A random explicit tree with a common horizon.
pub fn random_tree<R: Rng>(rng: &mut R, shape: &TreeShape) -> TrajectoryTree {
    let mut g = Gen::new(shape.depth);
    g.grow(rng, "r", 0, shape);
    g.finish()
}

/// A tree with the structure of the example without martingale measure: at
/// the root a type II child with positive increment, whose own moves are all
/// up (explicit children or a family `c(1 + t)`), next to a family with
/// increments `−c t^k` approaching 0 from below and optional further negative
/// explicit children. Everything is constant after the first move below the
/// type II child.
pub fn no_measure_tree<R: Rng>(rng: &mut R) -> TrajectoryTree {
    let horizon = rng.gen_range(2..=3);
    let mut g = Gen::new(horizon);
    let a = quarter(rng.gen_range(1..=8));
    let u = g.child("r", a, 1);
    if rng.gen_bool(0.5) {
        let c = q(rng.gen_range(1..=3), 7);
        g.b.family(&u, Poly::new(vec![c.clone(), c]), 1, Some("up"));
    } else {
        let n = rng.gen_range(1..=2);
        for inc in increments(rng, n, true, false, (true, false, false)) {
            let c = g.child(&u, inc, 2);
            g.flat_chain(&c, 2, horizon);
        }
    }
    let k = rng.gen_range(1..=2);
    let mut coeffs = vec![Q::from_integer(0.into()); k + 1];
    coeffs[k] = -q(rng.gen_range(1..=3), 7);
    g.b.family("r", Poly::new(coeffs), 1, Some("down"));
    let n = rng.gen_range(0..=2);
    for inc in increments(rng, n, false, false, (false, true, false)) {
        let c = g.child("r", inc, 1);
        g.flat_chain(&c, 1, horizon);
    }
    g.finish()
}

/// A tree satisfying (H.3) by construction: a random arbitrage-free explicit
/// tree, families `±c t` attached to some up-down nodes, and type II children
/// inserted strictly between the lowest and highest increments of their
/// up-down parent (whose other children are never type II).
pub fn h3_tree<R: Rng>(rng: &mut R, depth: usize, branching: usize) -> TrajectoryTree {
    let depth = depth.max(2);
    let mut g = Gen::new(depth);
    let shape = TreeShape {
        depth,
        branching,
        arbitrage_free: true,
    };
    // Grow by hand to know each node's children.
    let mut stack = vec![("r".to_string(), 0usize)];
    let mut fam = 0usize;
    while let Some((label, time)) = stack.pop() {
        if time == depth {
            continue;
        }
        let flat = rng.gen_bool(0.15);
        let incs = if flat {
            vec![Q::from_integer(0.into())]
        } else {
            let n = rng.gen_range(2..=shape.branching.max(2));
            increments(rng, n, true, true, (true, true, true))
        };
        for inc in &incs {
            let c = g.child(&label, inc.clone(), time + 1);
            stack.push((c, time + 1));
        }
        if flat {
            continue;
        }
        if rng.gen_bool(0.3) {
            fam += 1;
            let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
            let name = format!("f{fam}");
            g.b.family(
                &label,
                Poly::new(vec![Q::from_integer(0.into()), q(sign * rng.gen_range(1..=3), 7)]),
                1,
                Some(&name),
            );
        }
        if time + 1 < depth && rng.gen_bool(0.4) {
            // Strictly inside (min, max) and distinct from the siblings.
            let lo = incs.first().expect("nonempty").clone();
            let hi = incs.last().expect("nonempty").clone();
            let x = (&lo + &hi) / Q::from_integer(2.into()) + q(1, 16);
            let x = if x >= hi || x <= lo {
                (&lo + &hi) / Q::from_integer(2.into())
            } else {
                x
            };
            if incs.contains(&x) {
                continue;
            }
            let u = g.child(&label, x, time + 1);
            let up = rng.gen_bool(0.5);
            let s = if up { 1 } else { -1 };
            if rng.gen_bool(0.5) {
                fam += 1;
                let c = q(s * rng.gen_range(1..=3), 7);
                g.b.family(&u, Poly::new(vec![c.clone(), c]), 1, Some(&format!("f{fam}")));
            } else {
                let n = rng.gen_range(1..=2);
                for inc in increments(rng, n, up, !up, (up, !up, false)) {
                    let c = g.child(&u, inc, time + 2);
                    g.flat_chain(&c, time + 2, depth);
                }
            }
        }
    }
    g.finish()
}

/// A random payoff of the given maturity with values in `[lo, hi]` (quarters);
/// family slots get `a + b t` with `a, a + b` in range.
pub fn random_payoff<R: Rng>(rng: &mut R, tree: &TrajectoryTree, maturity: usize, lo: i64, hi: i64) -> PayoffSpec {
    let draw = |rng: &mut R| quarter(rng.gen_range(4 * lo..=4 * hi));
    PayoffSpec::from_slots(tree, maturity, |s| match s {
        Slot::Node(_) => Poly::constant(draw(rng)),
        Slot::Family { .. } => {
            let a = draw(rng);
            let b = draw(rng);
            Poly::new(vec![a.clone(), &b - &a])
        }
    })
}

/// A supermartingale built backwards: `f_T` random in `[0, hi]` and
/// `f_j = σ̄_j f_{j+1} + slack` with a random nonnegative slack at nodes where
/// (L) holds; elsewhere `f_j` is random in `[0, hi]`. Family slots get
/// `f_j = f_{j+1} + c` with `c ≥ 0`.
pub fn random_supermartingale<R: Rng>(
    rng: &mut R,
    tree: &TrajectoryTree,
    report: &AnalysisReport,
    hi: i64,
    cfg: &PricingConfig,
) -> Result<ProcessSequence, PricingError> {
    let t = tree.horizon();
    let mut steps = vec![random_payoff(rng, tree, t, 0, hi)];
    for j in (0..t).rev() {
        let next = steps.last().expect("nonempty").clone();
        let mut explicit = std::collections::BTreeMap::new();
        for v in tree.nodes_at(j) {
            let s = sigma_bar(tree, report, &next, v, cfg)?.value;
            let base = match s.hi.finite() {
                Some(x) if s.is_exact() && !s.lo.is_neg_inf() => x.clone().max(Q::from_integer(0.into())),
                _ => quarter(rng.gen_range(0..=4 * hi)),
            };
            explicit.insert(v, base + quarter(rng.gen_range(0..=2)));
        }
        let family = tree
            .families_at(j)
            .into_iter()
            .map(|f| {
                let c = quarter(rng.gen_range(0..=2));
                (
                    f,
                    &next.at_slot(tree, Slot::Family { family: f, time: j + 1 }) + &Poly::constant(c),
                )
            })
            .collect();
        steps.push(PayoffSpec {
            maturity: j,
            explicit,
            family,
        });
    }
    steps.reverse();
    Ok(ProcessSequence::new(steps))
}
