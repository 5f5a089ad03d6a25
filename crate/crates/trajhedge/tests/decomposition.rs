use std::collections::BTreeSet;

use trajhedge::analysis::analyze;
use trajhedge::corpus;
use trajhedge::decomposition::{
    candidate_decomposition, check_supermartingale, convergence_report, doob_decompose, feasible_step,
    martingale_floor_check, parse_decomposition, verify_decomposition, write_decomposition, DecompositionError,
    ExceptionCylinder, FloorStatus,
};
use trajhedge::model::{parse_process, parse_tree, HedgeSequence, ProcessSequence, Slot, TrajectoryTree};
use trajhedge::num::{q, qi};
use trajhedge::poly::Poly;
use trajhedge::pricing::{Feasibility, PricingConfig};

fn load(name: &str) -> (TrajectoryTree, ProcessSequence) {
    let t = parse_tree(corpus::file(&format!("{name}.tree"))).unwrap();
    let f = parse_process(&t, corpus::file(&format!("{name}.process"))).unwrap();
    (t, f)
}

#[test]
fn no_martingale_measure_round_trip() {
    let (t, f) = load("no_martingale_measure");
    let r = analyze(&t);
    let cfg = PricingConfig::default();
    let sm = check_supermartingale(&t, &r, &f, &cfg).unwrap();
    assert!(sm.holds, "{sm:?}");
    for d0 in [q(1, 10), q(1, 2), qi(2)] {
        let d = doob_decompose(&t, &r, &f, &[d0.clone(), q(1, 100)], &cfg).unwrap();
        let u = t.node_id("u").unwrap();
        assert_eq!(d.exception_set, BTreeSet::from([ExceptionCylinder::Node(u)]));
        let v = verify_decomposition(&t, &r, &f, &d, &cfg).unwrap();
        assert!(v.valid, "{v:?}");
        // The down tail forces a short position unless the slack covers it.
        assert_eq!(d.hedge.at(Slot::Node(t.root())).coeff(0) < qi(0), d0 < qi(1));

        let text = write_decomposition(&t, &d);
        assert_eq!(parse_decomposition(&t, &text).unwrap(), d);

        // (H.1) fails here, and the floor is indeed breached on the up branch.
        let floor = martingale_floor_check(&t, &r, &f, &d);
        assert_eq!(floor.status, FloorStatus::Refused);
        let h0 = d.hedge.at(Slot::Node(t.root())).coeff(0);
        assert_eq!(floor.breach.is_some(), &h0 + &floor.floor < qi(0), "{floor:?}");

        let mut bad = d.clone();
        let down = t.family_id("down").unwrap();
        let s = Slot::Family { family: down, time: 1 };
        let a = bad.alpha_at(s);
        bad.alpha.insert(s, &a - &Poly::constant(qi(10)));
        let v = verify_decomposition(&t, &r, &f, &bad, &cfg).unwrap();
        assert!(!v.valid);
        assert!(v.witness.unwrap().contains("down"));
    }
    // Zero slack cannot be hedged over the whole down tail.
    let fs = feasible_step(&t, &r, &f, t.root(), &qi(0), &cfg);
    assert!(matches!(fs, Feasibility::Infeasible { .. }), "{fs:?}");
    assert!(matches!(
        doob_decompose(&t, &r, &f, &[qi(0), qi(1)], &cfg),
        Err(DecompositionError::BadDeltas(_))
    ));
    let conv = convergence_report(&t, &r, &f, &cfg).unwrap();
    assert!(conv.limits_exist);
    assert!(conv.n_div.contains(&"shadow u".to_string()));
}

#[test]
fn l_failure_needs_unit_slack() {
    let (t, f) = load("l_failure");
    let r = analyze(&t);
    let cfg = PricingConfig::default();
    assert!(matches!(
        doob_decompose(&t, &r, &f, &[q(1, 2), q(1, 2), q(1, 2)], &cfg),
        Err(DecompositionError::NotLae(_))
    ));
    for d0 in [q(1, 4), q(1, 2), q(3, 4)] {
        let fs = feasible_step(&t, &r, &f, t.root(), &d0, &cfg);
        assert!(matches!(fs, Feasibility::Infeasible { .. }), "δ0 = {d0}: {fs:?}");
        // Any hedge leaves a negative compensator increment.
        let pp2 = t.node_id("pp2").unwrap();
        for k in -8..=8 {
            let mut h = HedgeSequence::new();
            h.explicit.insert(t.root(), q(k, 4));
            let d = candidate_decomposition(
                &t,
                &f,
                &[d0.clone(), q(1, 2), q(1, 2)],
                h,
                BTreeSet::from([ExceptionCylinder::Node(pp2)]),
            );
            assert!(!verify_decomposition(&t, &r, &f, &d, &cfg).unwrap().valid);
        }
    }
    let fs = feasible_step(&t, &r, &f, t.root(), &qi(1), &cfg);
    assert_eq!(fs.hedge(), Some(&qi(0)));
}

#[test]
fn coordinate_process_on_martingale_tree() {
    let t = parse_tree(corpus::file("point_mass_variant.tree")).unwrap();
    let r = analyze(&t);
    let cfg = PricingConfig::default();
    let f = ProcessSequence::constants(&t, &[qi(3), qi(2), qi(1)]);
    assert!(check_supermartingale(&t, &r, &f, &cfg).unwrap().holds);
    let d = doob_decompose(&t, &r, &f, &vec![q(1, 3); t.horizon()], &cfg).unwrap();
    assert!(verify_decomposition(&t, &r, &f, &d, &cfg).unwrap().valid);
    let up = ProcessSequence::constants(&t, &[qi(1), qi(2), qi(3)]);
    let sm = check_supermartingale(&t, &r, &up, &cfg).unwrap();
    assert!(!sm.holds && sm.witness.is_some());
}
