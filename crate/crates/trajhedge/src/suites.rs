//! Seeded property suites over generated instances. Each suite counts
//! checks and violations and keeps the first counterexample.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::analysis::{analyze, LStatus, NodeClass};
use crate::decomposition::{doob_decompose, martingale_floor_check, verify_decomposition, FloorStatus};
use crate::generate::{h3_tree, no_measure_tree, random_payoff, random_supermartingale, random_tree, TreeShape};
use crate::model::{NodeId, PayoffSpec, TrajectoryTree};
use crate::num::{fmt_q, q, ExtQ, Q};
use crate::oracle::{dual_price, grid_superhedge, martingale_measures};
use crate::pricing::{i_bar, sigma_bar, tower_check, Bounds, PricingConfig, PricingError};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub instances: usize,
    pub checks: usize,
    pub violations: usize,
    /// Instances skipped because a precondition did not hold.
    pub skipped: usize,
    pub first_violation: Option<String>,
}

impl SuiteReport {
    fn new(name: &str) -> Self {
        SuiteReport {
            name: name.to_string(),
            ..Default::default()
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.violations += 1;
            if self.first_violation.is_none() {
                self.first_violation = Some(what());
            }
        }
    }

    fn error(&mut self, e: impl fmt::Display) {
        self.check(false, || format!("error: {e}"));
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} instances, {} checks, {} violations, {} skipped",
            self.name, self.instances, self.checks, self.violations, self.skipped
        )?;
        if let Some(w) = &self.first_violation {
            write!(f, "; first: {w}")?;
        }
        Ok(())
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn exact(b: &Bounds) -> ExtQ {
    b.lo.clone()
}

fn inner_node<R: Rng>(rng: &mut R, tree: &TrajectoryTree, before: usize) -> NodeId {
    let cands: Vec<NodeId> = tree.nodes().filter(|v| tree.node(*v).time < before).collect();
    cands[rng.gen_range(0..cands.len())]
}

/// Decompose-then-verify on random supermartingales over explicit trees
/// (depth ≤ 4, branching ≤ 3), with δ-independence of the exception set.
pub fn decomposition_round_trip(seed: u64, count: usize) -> SuiteReport {
    let mut rep = SuiteReport::new("decomposition round-trip");
    let mut r = rng(seed);
    let cfg = PricingConfig::default();
    while rep.instances < count {
        let shape = TreeShape {
            depth: r.gen_range(1..=4),
            branching: r.gen_range(2..=3),
            arbitrage_free: r.gen_bool(0.5),
        };
        let tree = random_tree(&mut r, &shape);
        let report = analyze(&tree);
        if !report.l_ae {
            rep.skipped += 1;
            continue;
        }
        rep.instances += 1;
        let n = rep.instances;
        let f = match random_supermartingale(&mut r, &tree, &report, 3, &cfg) {
            Ok(f) => f,
            Err(e) => {
                rep.error(e);
                continue;
            }
        };
        let mut exceptions = Vec::new();
        for d in [q(1, 10), q(1, 1000)] {
            let deltas = vec![d.clone(); tree.horizon()];
            match doob_decompose(&tree, &report, &f, &deltas, &cfg) {
                Ok(dec) => {
                    match verify_decomposition(&tree, &report, &f, &dec, &cfg) {
                        Ok(v) => rep.check(v.valid, || format!("instance {n}: {}", v.witness.unwrap_or_default())),
                        Err(e) => rep.error(e),
                    }
                    exceptions.push(dec.exception_set);
                }
                Err(e) => rep.error(format!("instance {n}, δ = {}: {e}", fmt_q(&d))),
            }
        }
        if exceptions.len() == 2 {
            let same = exceptions[0] == exceptions[1];
            rep.check(same, || format!("instance {n}: exception set depends on δ"));
        }
    }
    rep
}

/// One instance of the operator identities on a random explicit tree.
fn identities_instance<R: Rng>(r: &mut R, rep: &mut SuiteReport, cfg: &PricingConfig) -> Result<(), PricingError> {
    let arbitrage_free = r.gen_bool(0.5);
    let shape = TreeShape {
        depth: r.gen_range(1..=3),
        branching: r.gen_range(2..=3),
        arbitrage_free,
    };
    let tree = random_tree(r, &shape);
    let report = analyze(&tree);
    let t = tree.horizon();
    let m = r.gen_range(1..=t);
    let f = random_payoff(r, &tree, m, -2, 2);
    let g = random_payoff(r, &tree, m, -2, 2);
    let v = inner_node(r, &tree, m);
    let sb = |p: &PayoffSpec| sigma_bar(&tree, &report, p, v, cfg).map(|x| exact(&x.value));
    let (sf, sg) = (sb(&f)?, sb(&g)?);
    let n = rep.instances;
    let label = tree.label(v).to_string();

    // Tower inequality between two dates below the maturity.
    let j = r.gen_range(0..m);
    let k = r.gen_range(j..=m);
    let tw = tower_check(&tree, &report, &f, j, k, cfg)?;
    rep.check(tw.holds, || {
        format!(
            "instance {n}: tower {j},{k}: {}",
            tw.witness.clone().unwrap_or_default()
        )
    });

    // Monotonicity.
    let bump = random_payoff(r, &tree, m, 0, 1);
    let fb = f.add(&bump, &tree);
    let sfb = sb(&fb)?;
    rep.check(sf <= sfb, || {
        format!("instance {n} at {label}: monotonicity {sf} > {sfb}")
    });

    // Subadditivity (−∞ absorbs).
    let sfg = sb(&f.add(&g, &tree))?;
    rep.check(sfg <= sf.add(&sg), || {
        format!("instance {n} at {label}: subadditivity {sfg} > {sf} + {sg}")
    });

    // Positive homogeneity.
    let c = q([1, 4, 6][r.gen_range(0..3)], 2);
    let scf = sb(&f.scale(&c))?;
    rep.check(scf == sf.scale(&c), || {
        format!("instance {n} at {label}: homogeneity with c = {}", fmt_q(&c))
    });

    // σ̄ ≤ Ī on nonnegative payoffs, with equality when (L) holds everywhere.
    let h = random_payoff(r, &tree, m, 0, 2);
    let sh = sb(&h)?;
    let ih = exact(&i_bar(&tree, &report, &h, v, cfg)?.value);
    rep.check(sh <= ih, || format!("instance {n} at {label}: σ̄ {sh} > Ī {ih}"));
    let all_l = tree.nodes().all(|u| report.l(u) == LStatus::Holds);
    if all_l {
        rep.check(sh == ih, || {
            format!("instance {n} at {label}: σ̄ {sh} ≠ Ī {ih} with (L) everywhere")
        });
    }

    // −∞ at type II nodes.
    for u in tree.nodes() {
        if report.class(u) == NodeClass::ArbitrageTypeII && tree.node(u).time < m {
            let s = exact(&sigma_bar(&tree, &report, &f, u, cfg)?.value);
            rep.check(s.is_neg_inf(), || {
                format!("instance {n}: σ̄ = {s} at type II node {}", tree.label(u))
            });
        }
    }
    Ok(())
}

/// Tower, monotonicity, subadditivity, homogeneity, σ̄ ≤ Ī and the `−∞`
/// rule on random explicit trees.
pub fn operator_identities(seed: u64, count: usize) -> SuiteReport {
    let mut rep = SuiteReport::new("operator identities");
    let mut r = rng(seed);
    let cfg = PricingConfig::default();
    while rep.instances < count {
        rep.instances += 1;
        match identities_instance(&mut r, &mut rep, &cfg) {
            Ok(()) => {}
            Err(PricingError::Undecided { .. }) => rep.skipped += 1,
            Err(e) => rep.error(e),
        }
    }
    rep
}

/// `dual_price = σ̄` exactly on random arbitrage-free trees (depth ≤ 4,
/// branching ≤ 4), grid upper bounds that tighten under refinement, and no
/// martingale measure on generated trees shaped like the example without
/// one, whose (L)-a.e. status is certified whenever (H.2) holds.
pub fn duality(seed: u64, count: usize) -> SuiteReport {
    let mut rep = SuiteReport::new("duality oracle");
    let mut r = rng(seed);
    let cfg = PricingConfig::default();
    for _ in 0..count {
        rep.instances += 1;
        let n = rep.instances;
        let shape = TreeShape {
            depth: r.gen_range(1..=4),
            branching: r.gen_range(2..=4),
            arbitrage_free: true,
        };
        let tree = random_tree(&mut r, &shape);
        let report = analyze(&tree);
        let m = r.gen_range(1..=tree.horizon());
        let f = random_payoff(&mut r, &tree, m, -3, 3);
        let v = inner_node(&mut r, &tree, m);
        for node in [tree.root(), v] {
            let s = sigma_bar(&tree, &report, &f, node, &cfg).map(|x| exact(&x.value));
            match (dual_price(&tree, &f, node), s) {
                (Ok(d), Ok(s)) => rep.check(ExtQ::Finite(d.clone()) == s, || {
                    format!("instance {n} at {}: dual {} ≠ σ̄ {s}", tree.label(node), fmt_q(&d))
                }),
                (Err(e), _) => rep.error(e),
                (_, Err(e)) => rep.error(e),
            }
        }
        if n.is_multiple_of(4) {
            let s = exact(
                &sigma_bar(&tree, &report, &f, tree.root(), &cfg)
                    .expect("priced above")
                    .value,
            );
            let mut prev: Option<Q> = None;
            for step in [q(1, 2), q(1, 4), q(1, 8)] {
                match grid_superhedge(&tree, &f, tree.root(), &q(12, 1), &step) {
                    Ok(g) => {
                        rep.check(ExtQ::Finite(g.value.clone()) >= s, || {
                            format!("instance {n}: grid below σ̄")
                        });
                        if let Some(p) = &prev {
                            rep.check(g.value <= *p, || format!("instance {n}: grid not monotone"));
                        }
                        prev = Some(g.value);
                    }
                    Err(e) => rep.error(e),
                }
            }
        }
    }
    for _ in 0..count {
        rep.instances += 1;
        let n = rep.instances;
        let tree = no_measure_tree(&mut r);
        let report = analyze(&tree);
        for keep in 1..=3 {
            match tree
                .explicit_reduction(keep)
                .map_err(|e| e.to_string())
                .and_then(|e| martingale_measures(&e, e.root()).map_err(|x| x.to_string()))
            {
                Ok(ms) => rep.check(ms.is_empty(), || format!("instance {n}: measure on truncation {keep}")),
                Err(e) => rep.error(e),
            }
        }
        if report.hypotheses.h2.holds {
            rep.check(report.l_ae, || {
                format!("instance {n}: (H.2) holds but (L)-a.e. not certified")
            });
        } else {
            rep.skipped += 1;
        }
    }
    rep
}

/// (H.3) ⇒ (H.2) and (H.1) on trees satisfying (H.3) by construction, and
/// (L) fails exactly at type II nodes there.
pub fn hypothesis_soundness(seed: u64, count: usize) -> SuiteReport {
    let mut rep = SuiteReport::new("hypothesis soundness");
    let mut r = rng(seed);
    for _ in 0..count {
        rep.instances += 1;
        let n = rep.instances;
        let depth = r.gen_range(2..=4);
        let tree = h3_tree(&mut r, depth, 3);
        let report = analyze(&tree);
        let h = &report.hypotheses;
        rep.check(h.h3.holds, || {
            format!("instance {n}: generator produced (H.3) failure: {:?}", h.h3.witnesses)
        });
        rep.check(h.h2.holds, || {
            format!("instance {n}: (H.3) holds, (H.2) fails: {:?}", h.h2.witnesses)
        });
        rep.check(h.h1.holds, || {
            format!("instance {n}: (H.3) holds, (H.1) fails: {:?}", h.h1.witnesses)
        });
        for v in tree.nodes() {
            let fails = report.l(v) == LStatus::Fails;
            let type2 = report.class(v) == NodeClass::ArbitrageTypeII;
            rep.check(fails == type2, || {
                format!(
                    "instance {n}: node {} has (L) {:?} and class {:?}",
                    tree.label(v),
                    report.l(v),
                    report.class(v)
                )
            });
        }
    }
    rep
}

/// `f_0 + Σ δ + Σ H Δ S ≥ 0` on every trajectory for decompositions of
/// random nonnegative supermartingales on trees where (H.1) holds
/// (arbitrage-free explicit trees and (H.3) trees with families).
pub fn martingale_floor(seed: u64, count: usize) -> SuiteReport {
    let mut rep = SuiteReport::new("martingale floor");
    let mut r = rng(seed);
    let cfg = PricingConfig::default();
    while rep.instances < count {
        let tree = if r.gen_bool(0.5) {
            let shape = TreeShape {
                depth: r.gen_range(1..=3),
                branching: 3,
                arbitrage_free: true,
            };
            random_tree(&mut r, &shape)
        } else {
            let depth = r.gen_range(2..=3);
            h3_tree(&mut r, depth, 3)
        };
        let report = analyze(&tree);
        if !report.l_ae || !report.hypotheses.h1.holds {
            rep.skipped += 1;
            continue;
        }
        rep.instances += 1;
        let n = rep.instances;
        let f = match random_supermartingale(&mut r, &tree, &report, 3, &cfg) {
            Ok(f) => f,
            Err(e) => {
                rep.error(e);
                continue;
            }
        };
        let d = q(1, 10 * r.gen_range(1..=10));
        match doob_decompose(&tree, &report, &f, &vec![d; tree.horizon()], &cfg) {
            Ok(dec) => {
                let fl = martingale_floor_check(&tree, &report, &f, &dec);
                rep.check(fl.status == FloorStatus::Pass, || {
                    format!(
                        "instance {n}: {} {}",
                        fl.status,
                        fl.breach.clone().or(fl.reason.clone()).unwrap_or_default()
                    )
                });
            }
            Err(e) => rep.error(format!("instance {n}: {e}")),
        }
    }
    rep
}
