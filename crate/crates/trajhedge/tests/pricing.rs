use trajhedge::analysis::analyze;
use trajhedge::corpus;
use trajhedge::model::{parse_payoff, parse_tree, FamilyId, PayoffSpec, Slot, TrajectoryTree};
use trajhedge::num::{q, qi, ExtQ};
use trajhedge::poly::Poly;
use trajhedge::pricing::{
    check_integrable, i_bar, is_null, norm_j, sigma_bar, tower_check, Event, EventPart, PricingConfig,
};
use trajhedge::pwl::Direction;

fn tree(name: &str) -> TrajectoryTree {
    parse_tree(corpus::file(name)).unwrap()
}

fn fam(t: &TrajectoryTree, label: &str) -> FamilyId {
    t.family_id(label).unwrap()
}

#[test]
fn no_martingale_measure_prices() {
    let t = tree("no_martingale_measure.tree");
    let r = analyze(&t);
    let f = parse_payoff(&t, corpus::file("no_martingale_measure.payoff")).unwrap();
    let cfg = PricingConfig::default();
    let s = sigma_bar(&t, &r, &f, t.root(), &cfg).unwrap();
    assert_eq!(s.exact(), Some(&ExtQ::zero()));
    assert!(!s.attained);
    assert_eq!(s.drift, Some(Direction::Down));
    let i = i_bar(&t, &r, &f, t.root(), &cfg).unwrap();
    assert_eq!(i.exact(), Some(&ExtQ::Finite(q(1, 2))));
    assert!(i.attained);
    let cert = i.hedge.unwrap();
    assert_eq!(cert.initial_capital, q(1, 2));
    assert_eq!(cert.hedge.at(Slot::Node(t.root())), Poly::constant(q(-1, 2)));
    for n0 in [1, 5, 50] {
        let e = Event::of(vec![EventPart::FamilyTail {
            family: fam(&t, "down"),
            from: n0,
        }]);
        let nr = is_null(&t, &e, t.root(), &cfg).unwrap();
        assert_eq!(nr.result.exact(), Some(&ExtQ::Finite(qi(1))), "n0 = {n0}");
        assert!(!nr.null);
    }
    let up = Event::of(vec![EventPart::Cylinder(t.node_id("u").unwrap())]);
    assert!(is_null(&t, &up, t.root(), &cfg).unwrap().null);
    assert!(is_null(&t, &Event::empty(), t.root(), &cfg).unwrap().null);
    let zero = PayoffSpec::constant(&t, 1, qi(0));
    assert_eq!(norm_j(&t, &zero, t.root(), &cfg).unwrap().exact(), Some(&ExtQ::zero()));
    let tw = tower_check(&t, &r, &f, 0, 1, &cfg).unwrap();
    assert!(tw.holds, "{tw:?}");
    let ci = check_integrable(&t, &r, &f, 0, &cfg).unwrap();
    assert!(ci.holds, "{ci:?}");

    // Mutations.
    let no_waivers = PricingConfig {
        waivers: false,
        ..PricingConfig::default()
    };
    assert_eq!(
        sigma_bar(&t, &r, &f, t.root(), &no_waivers).unwrap().exact(),
        Some(&ExtQ::Finite(q(1, 2)))
    );
    let no_nonneg = PricingConfig {
        nonnegativity: false,
        ..PricingConfig::default()
    };
    assert_eq!(
        i_bar(&t, &r, &f, t.root(), &no_nonneg).unwrap().exact(),
        Some(&ExtQ::zero())
    );
}

#[test]
fn point_mass_variant_prices() {
    let t = tree("point_mass_variant.tree");
    let cfg = PricingConfig::default();
    let z = parse_payoff(&t, corpus::file("point_mass_variant_zero.payoff")).unwrap();
    let m = parse_payoff(&t, corpus::file("point_mass_variant_down.payoff")).unwrap();
    assert_eq!(
        norm_j(&t, &z, t.root(), &cfg).unwrap().exact(),
        Some(&ExtQ::Finite(qi(1)))
    );
    assert_eq!(
        norm_j(&t, &m, t.root(), &cfg).unwrap().exact(),
        Some(&ExtQ::Finite(q(1, 2)))
    );
}

#[test]
fn l_failure_prices() {
    let t = tree("l_failure.tree");
    let r = analyze(&t);
    let cfg = PricingConfig::default();
    let f1 = parse_payoff(&t, corpus::file("l_failure.payoff")).unwrap();
    let s = sigma_bar(&t, &r, &f1, t.root(), &cfg).unwrap();
    assert_eq!(s.exact(), Some(&ExtQ::Finite(qi(1))));
    let e = Event::of(vec![EventPart::Cylinder(t.node_id("pm2").unwrap())]);
    let nr = is_null(&t, &e, t.root(), &cfg).unwrap();
    assert_eq!(nr.result.exact(), Some(&ExtQ::Finite(q(1, 3))));
}
