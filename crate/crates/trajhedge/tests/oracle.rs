use trajhedge::analysis::analyze;
use trajhedge::corpus;
use trajhedge::model::{parse_tree, PayoffSpec, TrajectoryTree};
use trajhedge::num::{q, qi, ExtQ};
use trajhedge::oracle::{coupled_i_bar, dual_price, martingale_measures};
use trajhedge::pricing::{i_bar, indicator, Event, EventPart, PricingConfig};

fn tree(name: &str) -> TrajectoryTree {
    parse_tree(corpus::file(name)).unwrap()
}

#[test]
fn no_martingale_measure_on_truncations() {
    let t = tree("no_martingale_measure.tree");
    for keep in [1, 3, 10] {
        let e = t.explicit_reduction(keep).unwrap();
        let ms = martingale_measures(&e, e.root()).unwrap();
        assert!(ms.is_empty(), "keep = {keep}");
        assert!(dual_price(&e, &PayoffSpec::constant(&e, 1, qi(1)), e.root()).is_err());
    }
}

#[test]
fn point_mass_variant_has_point_mass_measure() {
    let t = tree("point_mass_variant.tree");
    for keep in [1, 4] {
        let e = t.explicit_reduction(keep).unwrap();
        let ms = martingale_measures(&e, e.root()).unwrap();
        let m = ms.unique(&e).unwrap();
        assert_eq!(m, vec![(e.node_id("z2").unwrap(), qi(1))]);
    }
}

#[test]
fn l_failure_coupled_program_agrees() {
    let t = tree("l_failure.tree");
    let cfg = PricingConfig::default();
    let r = analyze(&t);
    let pm2 = t.node_id("pm2").unwrap();
    let (split, ind) = indicator(&t, &Event::of(vec![EventPart::Cylinder(pm2)])).unwrap();
    let engine = i_bar(&split, &analyze(&split), &ind, split.root(), &cfg).unwrap();
    assert_eq!(engine.exact(), Some(&ExtQ::Finite(q(1, 3))));
    assert!(!r.l_ae);
    for keep in [1, 3] {
        let e = t.explicit_reduction(keep).unwrap();
        let re = analyze(&e);
        let epm2 = e.node_id("pm2").unwrap();
        let f = PayoffSpec::from_fns(&e, 2, |v| if v == epm2 { qi(1) } else { qi(0) }, |_| unreachable!());
        assert_eq!(coupled_i_bar(&e, &re, &f, e.root()).unwrap(), q(1, 3));
    }
}
