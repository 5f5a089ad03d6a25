//! The regression corpus: every quoted value of the bundled examples,
//! recomputed and compared.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::analysis::{analyze, LStatus, NodeClass};
use crate::corpus;
use crate::decomposition::{
    candidate_decomposition, check_supermartingale, doob_decompose, feasible_step, verify_decomposition,
    ExceptionCylinder,
};
use crate::model::{
    parse_payoff, parse_process, parse_tree, wealth, ChildRef, HedgeSequence, PayoffSpec, SimpleStrategy, Slot,
    TrajectoryTree,
};
use crate::num::{fmt_q, q, qi, Q};
use crate::oracle::{coupled_i_bar, martingale_measures};
use crate::poly::Poly;
use crate::pricing::{
    i_bar, is_null, norm_j, sigma_bar, Bounds, Event, EventPart, Feasibility, PricingConfig, PricingError,
};
use crate::pwl::Direction;

/// One corpus item: expected against computed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CorpusEntry {
    pub id: String,
    pub example: &'static str,
    pub item: &'static str,
    pub expected: String,
    pub computed: String,
    pub pass: bool,
}

type Outcome = Result<(String, bool), String>;

fn load(name: &str) -> Result<TrajectoryTree, String> {
    parse_tree(corpus::file(name)).map_err(|e| format!("{name}: {e}"))
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// `b` matches `target` exactly, or within `tol` when the bounds are an
/// interval.
fn close(b: &Bounds, target: &Q, tol: f64) -> bool {
    b.contains(target) && b.width() <= tol
}

fn failing(tree: &TrajectoryTree) -> Vec<String> {
    let r = analyze(tree);
    tree.nodes()
        .filter(|v| r.l(*v) == LStatus::Fails)
        .map(|v| tree.label(v).to_string())
        .collect()
}

struct Ctx {
    cfg: PricingConfig,
}

impl Ctx {
    fn nmm(&self) -> Result<TrajectoryTree, String> {
        load("no_martingale_measure.tree")
    }

    fn lf(&self) -> Result<TrajectoryTree, String> {
        load("l_failure.tree")
    }

    fn parse_structure(&self) -> Outcome {
        let t = self.nmm()?;
        let explicit = t
            .children(t.root())
            .iter()
            .filter(|c| matches!(c, ChildRef::Node(_)))
            .count();
        let fams: Vec<String> = t
            .families()
            .map(|f| format!("{}@{}", t.family(f).label, t.label(t.family(f).parent)))
            .collect();
        let got = format!("{explicit} explicit child; families {}", fams.join(", "));
        Ok((got.clone(), got == "1 explicit child; families up@u, down@r"))
    }

    fn certificate_wealth(&self) -> Outcome {
        let t = self.nmm()?;
        let mut hedge = HedgeSequence::new();
        hedge.explicit.insert(t.root(), q(-1, 2));
        let s = SimpleStrategy {
            initial_capital: q(1, 2),
            hedge,
            start_time: 0,
        };
        let down = t.family_id("down").map_err(err)?;
        let w = wealth(&t, &s, Slot::Family { family: down, time: 2 })
            .map_err(err)?
            .as_poly();
        let want = Poly::new(vec![q(1, 2), qi(0), q(1, 2)]);
        Ok((w.pretty(), w == want))
    }

    fn class_of(&self, label: &str, want: NodeClass) -> Outcome {
        let t = self.nmm()?;
        let r = analyze(&t);
        let c = r.class(t.node_id(label).map_err(err)?);
        Ok((c.to_string(), c == want))
    }

    fn shadow_covers_up_branch(&self) -> Outcome {
        let t = self.nmm()?;
        let r = analyze(&t);
        let u = t.node_id("u").map_err(err)?;
        let up = t.family_id("up").map_err(err)?;
        let ok = r.null_cover.type_ii_shadows.contains(&u)
            && r.null_cover.covers_slot(&t, Slot::Family { family: up, time: 2 });
        Ok((
            format!(
                "shadows: {:?}",
                r.null_cover
                    .type_ii_shadows
                    .iter()
                    .map(|v| t.label(*v))
                    .collect::<Vec<_>>()
            ),
            ok,
        ))
    }

    fn l_fails_exactly(&self) -> Outcome {
        let f = failing(&self.nmm()?);
        Ok((f.join(", "), f == ["u"]))
    }

    fn l_fails_at_p1(&self) -> Outcome {
        let f = failing(&self.lf()?);
        Ok((f.join(", "), f.iter().any(|x| x == "p1")))
    }

    fn h2_holds(&self) -> Outcome {
        let r = analyze(&self.nmm()?);
        Ok((
            if r.hypotheses.h2.holds { "holds" } else { "fails" }.into(),
            r.hypotheses.h2.holds,
        ))
    }

    fn l_ae(&self, tree: Result<TrajectoryTree, String>, want: bool) -> Outcome {
        let r = analyze(&tree?);
        Ok((r.l_ae.to_string(), r.l_ae == want))
    }

    fn sigma_f(&self) -> Outcome {
        let t = self.nmm()?;
        let r = analyze(&t);
        let f = parse_payoff(&t, corpus::file("no_martingale_measure.payoff")).map_err(err)?;
        let s = sigma_bar(&t, &r, &f, t.root(), &self.cfg).map_err(err)?;
        let drift = s
            .drift
            .map(|d| format!(", drift {}", if d == Direction::Up { "up" } else { "down" }));
        let got = format!(
            "{} ({}){}",
            s.value,
            if s.attained { "attained" } else { "not attained" },
            drift.unwrap_or_default()
        );
        let ok = close(&s.value, &qi(0), self.cfg.tolerance) && !s.attained && s.drift == Some(Direction::Down);
        Ok((got, ok))
    }

    fn sigma_f1(&self) -> Outcome {
        let t = self.lf()?;
        let r = analyze(&t);
        let f = parse_payoff(&t, corpus::file("l_failure.payoff")).map_err(err)?;
        let s = sigma_bar(&t, &r, &f, t.root(), &self.cfg).map_err(err)?;
        Ok((s.value.to_string(), close(&s.value, &qi(1), self.cfg.tolerance)))
    }

    fn tails_not_null(&self) -> Outcome {
        let t = self.nmm()?;
        let down = t.family_id("down").map_err(err)?;
        let mut got = Vec::new();
        let mut ok = true;
        for n0 in [1, 5, 50] {
            let e = Event::of(vec![EventPart::FamilyTail { family: down, from: n0 }]);
            let nr = is_null(&t, &e, t.root(), &self.cfg).map_err(err)?;
            ok &= close(&nr.result.value, &qi(1), self.cfg.tolerance) && !nr.null;
            got.push(format!("n0={n0}: {}", nr.result.value));
        }
        Ok((got.join("; "), ok))
    }

    fn i_bar_f(&self) -> Outcome {
        let t = self.nmm()?;
        let r = analyze(&t);
        let f = parse_payoff(&t, corpus::file("no_martingale_measure.payoff")).map_err(err)?;
        let i = i_bar(&t, &r, &f, t.root(), &self.cfg).map_err(err)?;
        let (v, h) = match &i.hedge {
            Some(s) => (s.initial_capital.clone(), s.hedge.at(Slot::Node(t.root())).coeff(0)),
            None => return Ok((format!("{} without certificate", i.value), false)),
        };
        let got = format!("{} (V = {}, H0 = {})", i.value, fmt_q(&v), fmt_q(&h));
        let ok = i.value.as_q() == Some(&q(1, 2)) && v == q(1, 2) && h == q(-1, 2);
        Ok((got, ok))
    }

    fn variant_norms(&self) -> Outcome {
        let t = load("point_mass_variant.tree")?;
        let z = parse_payoff(&t, corpus::file("point_mass_variant_zero.payoff")).map_err(err)?;
        let m = parse_payoff(&t, corpus::file("point_mass_variant_down.payoff")).map_err(err)?;
        let a = norm_j(&t, &z, t.root(), &self.cfg).map_err(err)?.value;
        let b = norm_j(&t, &m, t.root(), &self.cfg).map_err(err)?.value;
        let ok = a.as_q() == Some(&qi(1)) && b.as_q() == Some(&q(1, 2));
        Ok((format!("S0: {a}; S-: {b}"), ok))
    }

    fn up_branch_null(&self) -> Outcome {
        let t = self.nmm()?;
        let u = t.node_id("u").map_err(err)?;
        let nr = is_null(&t, &Event::of(vec![EventPart::Cylinder(u)]), t.root(), &self.cfg).map_err(err)?;
        let g = PayoffSpec::from_slots(&t, 2, |s| {
            Poly::constant(if t.slot_ancestor(s, 1) == Slot::Node(u) {
                qi(1)
            } else {
                qi(0)
            })
        });
        let norm = norm_j(&t, &g, t.root(), &self.cfg).map_err(err)?.value;
        Ok((
            format!("null = {}, norm = {norm}", nr.null),
            nr.null && norm.as_q() == Some(&qi(0)),
        ))
    }

    fn singleton_not_null(&self) -> Outcome {
        let t = self.lf()?;
        let pm2 = t.node_id("pm2").map_err(err)?;
        let nr = is_null(&t, &Event::of(vec![EventPart::Cylinder(pm2)]), t.root(), &self.cfg).map_err(err)?;
        let lo = nr.result.value.lo.clone();
        let ok = !nr.null && lo.to_f64() >= 1.0 / 6.0 - 1e-9 && nr.result.value.as_q() == Some(&q(1, 3));
        Ok((format!("{} (null = {})", nr.result.value, nr.null), ok))
    }

    fn coupled_program(&self) -> Outcome {
        let t = self.lf()?.explicit_reduction(3).map_err(err)?;
        let r = analyze(&t);
        let pm2 = t.node_id("pm2").map_err(err)?;
        let f = PayoffSpec::from_fns(&t, 2, |v| if v == pm2 { qi(1) } else { qi(0) }, |_| Poly::zero());
        let v = coupled_i_bar(&t, &r, &f, t.root()).map_err(err)?;
        Ok((fmt_q(&v), v == q(1, 3)))
    }

    fn supermartingale(&self) -> Outcome {
        let t = self.nmm()?;
        let r = analyze(&t);
        let f = parse_process(&t, corpus::file("no_martingale_measure.process")).map_err(err)?;
        let sm = check_supermartingale(&t, &r, &f, &self.cfg).map_err(err)?;
        Ok((sm.holds.to_string(), sm.holds))
    }

    fn decomposition(&self) -> Outcome {
        let t = self.nmm()?;
        let r = analyze(&t);
        let f = parse_process(&t, corpus::file("no_martingale_measure.process")).map_err(err)?;
        let mut got = Vec::new();
        let mut ok = true;
        for d0 in [q(1, 10), q(1, 1000)] {
            let d = doob_decompose(&t, &r, &f, &[d0.clone(), d0.clone()], &self.cfg).map_err(err)?;
            let v = verify_decomposition(&t, &r, &f, &d, &self.cfg).map_err(err)?;
            let h0 = d.hedge.at(Slot::Node(t.root())).coeff(0);
            ok &= v.valid && h0 < qi(0);
            got.push(format!(
                "δ={}: H0 = {}, {}",
                fmt_q(&d0),
                fmt_q(&h0),
                if v.valid { "verified" } else { "rejected" }
            ));
        }
        Ok((got.join("; "), ok))
    }

    fn zero_slack(&self) -> Outcome {
        let t = self.nmm()?;
        let r = analyze(&t);
        let f = parse_process(&t, corpus::file("no_martingale_measure.process")).map_err(err)?;
        Ok(match feasible_step(&t, &r, &f, t.root(), &qi(0), &self.cfg) {
            Feasibility::Infeasible { rounds, .. } => (format!("infeasible after {rounds} rounds"), rounds <= 200),
            other => (format!("{other:?}"), false),
        })
    }

    fn unit_slack_needed(&self) -> Outcome {
        let t = self.lf()?;
        let r = analyze(&t);
        let f = parse_process(&t, corpus::file("l_failure.process")).map_err(err)?;
        let pp2 = t.node_id("pp2").map_err(err)?;
        let mut ok = true;
        let mut got = Vec::new();
        for d0 in [q(1, 4), q(1, 2), q(3, 4)] {
            let infeasible = matches!(
                feasible_step(&t, &r, &f, t.root(), &d0, &self.cfg),
                Feasibility::Infeasible { .. }
            );
            let mut rejected = true;
            for k in -8..=8 {
                let mut h = HedgeSequence::new();
                h.explicit.insert(t.root(), q(k, 4));
                let deltas = [d0.clone(), q(1, 2), q(1, 2)];
                let d = candidate_decomposition(&t, &f, &deltas, h, BTreeSet::from([ExceptionCylinder::Node(pp2)]));
                rejected &= !verify_decomposition(&t, &r, &f, &d, &self.cfg).map_err(err)?.valid;
            }
            ok &= infeasible && rejected;
            got.push(format!(
                "δ0={}: {}",
                fmt_q(&d0),
                if infeasible && rejected { "none" } else { "found" }
            ));
        }
        let at_one = feasible_step(&t, &r, &f, t.root(), &qi(1), &self.cfg).hedge().is_some();
        ok &= at_one;
        got.push(format!("δ0=1: {}", if at_one { "feasible" } else { "infeasible" }));
        Ok((got.join("; "), ok))
    }

    fn no_measure(&self) -> Outcome {
        let t = self.nmm()?.explicit_reduction(1).map_err(err)?;
        let ms = martingale_measures(&t, t.root()).map_err(err)?;
        Ok((
            if ms.is_empty() {
                "empty".into()
            } else {
                format!("{} vertices", ms.vertex_count(&t))
            },
            ms.is_empty(),
        ))
    }

    fn point_mass(&self) -> Outcome {
        let t = load("point_mass_variant.tree")?.explicit_reduction(3).map_err(err)?;
        let ms = martingale_measures(&t, t.root()).map_err(err)?;
        Ok(match ms.unique(&t) {
            Some(m) => {
                let got = m
                    .iter()
                    .map(|(v, p)| format!("{}: {}", t.label(*v), fmt_q(p)))
                    .collect::<Vec<_>>()
                    .join(", ");
                let ok = m.len() == 1 && t.label(m[0].0) == "z2" && m[0].1 == qi(1);
                (got, ok)
            }
            None => ("not unique".into(), false),
        })
    }

    fn incomplete(&self) -> Outcome {
        let t = load("unbounded_constancy.tree")?;
        let r = analyze(&t);
        let u = t.node_id("u").map_err(err)?;
        let f = PayoffSpec::constant(&t, 1, qi(0));
        let refused = matches!(
            sigma_bar(&t, &r, &f, t.root(), &self.cfg),
            Err(PricingError::Incomplete(_))
        );
        let ok = !r.complete && r.l(u) == LStatus::Undecided && refused;
        Ok((
            format!(
                "complete = {}, (L) at u {:?}, pricing refused = {refused}",
                r.complete,
                r.l(u)
            ),
            ok,
        ))
    }
}

/// Evaluates the whole corpus under a pricing configuration.
pub fn corpus_entries(cfg: &PricingConfig) -> Vec<CorpusEntry> {
    let c = Ctx { cfg: cfg.clone() };
    const NMM: &str = "no_martingale_measure";
    const PMV: &str = "point_mass_variant";
    const LF: &str = "l_failure";
    const UC: &str = "unbounded_constancy";
    let items: Vec<(&str, &str, &str, Outcome)> = vec![
        (
            NMM,
            "document structure",
            "1 explicit child; families up@u, down@r",
            c.parse_structure(),
        ),
        (
            NMM,
            "wealth of V = 1/2, H0 = -1/2 on the down family",
            "1/2 + 1/2 t^2",
            c.certificate_wealth(),
        ),
        (
            NMM,
            "class of the up node",
            "arbitrage-II",
            c.class_of("u", NodeClass::ArbitrageTypeII),
        ),
        (NMM, "class of the root", "up-down", c.class_of("r", NodeClass::UpDown)),
        (
            NMM,
            "up branch covered by a type II shadow",
            "shadow of u",
            c.shadow_covers_up_branch(),
        ),
        (NMM, "nodes where (L) fails", "u", c.l_fails_exactly()),
        (NMM, "(H.2)", "holds", c.h2_holds()),
        (NMM, "(L) almost everywhere", "true", c.l_ae(c.nmm(), true)),
        (
            NMM,
            "sigma-bar f at the root",
            "0 (not attained), drift down",
            c.sigma_f(),
        ),
        (
            NMM,
            "I-bar of the down tail from n0 = 1, 5, 50",
            "1",
            c.tails_not_null(),
        ),
        (NMM, "I-bar f with certificate", "1/2 (V = 1/2, H0 = -1/2)", c.i_bar_f()),
        (
            NMM,
            "up branch is null, norm of its indicator",
            "null, 0",
            c.up_branch_null(),
        ),
        (
            NMM,
            "martingale measures of the explicit truncation",
            "empty",
            c.no_measure(),
        ),
        (
            NMM,
            "process (0, f, f) is a supermartingale",
            "true",
            c.supermartingale(),
        ),
        (
            NMM,
            "decomposition with delta = 1/10, 1/1000",
            "verified, H0 < 0",
            c.decomposition(),
        ),
        (
            NMM,
            "one-step system with delta0 = 0",
            "infeasible within 200 rounds",
            c.zero_slack(),
        ),
        (
            PMV,
            "norms of the indicators of S0 and S-",
            "1 and 1/2",
            c.variant_norms(),
        ),
        (
            PMV,
            "martingale measure of the explicit truncation",
            "point mass on S0",
            c.point_mass(),
        ),
        (
            UC,
            "classification only",
            "incomplete, (L) undecided, pricing refused",
            c.incomplete(),
        ),
        (LF, "nodes where (L) fails", "includes p1", c.l_fails_at_p1()),
        (LF, "(L) almost everywhere", "false", c.l_ae(c.lf(), false)),
        (
            LF,
            "I-bar of the indicator of S+-",
            "1/3 (at least 1/6)",
            c.singleton_not_null(),
        ),
        (LF, "coupled program for the same indicator", "1/3", c.coupled_program()),
        (LF, "sigma-bar f1 at the root", "1", c.sigma_f1()),
        (
            LF,
            "decompositions with delta0 < 1",
            "none; delta0 = 1 feasible",
            c.unit_slack_needed(),
        ),
    ];
    items
        .into_iter()
        .enumerate()
        .map(|(i, (example, item, expected, out))| {
            let (computed, pass) = match out {
                Ok(x) => x,
                Err(e) => (format!("error: {e}"), false),
            };
            CorpusEntry {
                id: format!("C{:02}", i + 1),
                example,
                item,
                expected: expected.to_string(),
                computed,
                pass,
            }
        })
        .collect()
}
