use trajhedge::analysis::{analyze, good_nodes, good_nodes_by_paths, LStatus, NodeClass};
use trajhedge::corpus;
use trajhedge::model::{parse_tree, ChildRef, TrajectoryTree};

fn tree(name: &str) -> TrajectoryTree {
    parse_tree(corpus::file(name)).unwrap()
}

#[test]
fn no_martingale_measure_analysis() {
    let t = tree("no_martingale_measure.tree");
    let r = analyze(&t);
    let u = t.node_id("u").unwrap();
    assert_eq!(
        t.children(t.root())
            .iter()
            .filter(|c| matches!(c, ChildRef::Node(_)))
            .count(),
        1
    );
    assert_eq!(r.class(t.root()), NodeClass::UpDown);
    assert_eq!(r.class(u), NodeClass::ArbitrageTypeII);
    assert_eq!(r.l(t.root()), LStatus::Holds);
    assert_eq!(r.l(u), LStatus::Fails);
    assert!(r.null_cover.type_ii_shadows.contains(&u));
    assert!(r.negligible(&t, u));
    assert!(r.l_ae);
    assert!(r.hypotheses.h2.holds);
    // The type II node is the largest move at the root, so nothing straddles it.
    assert!(!r.hypotheses.h3.holds);
    assert!(!r.hypotheses.h1.holds);
    assert_eq!(good_nodes(&t), good_nodes_by_paths(&t));
}

#[test]
fn point_mass_variant_analysis() {
    let t = tree("point_mass_variant.tree");
    let r = analyze(&t);
    assert!(r.l_ae);
    assert_eq!(r.l(t.node_id("u").unwrap()), LStatus::Fails);
    for v in ["z1", "m1"] {
        assert_eq!(r.class(t.node_id(v).unwrap()), NodeClass::Flat);
    }
    assert_eq!(good_nodes(&t), good_nodes_by_paths(&t));
}

#[test]
fn unbounded_constancy_is_incomplete() {
    let t = tree("unbounded_constancy.tree");
    let r = analyze(&t);
    assert!(!r.complete);
    let u = t.node_id("u").unwrap();
    assert_eq!(r.l(u), LStatus::Undecided);
    assert_eq!(r.undecided(), vec![u]);
    assert!(r.hypotheses.h5.holds);
}

#[test]
fn l_failure_analysis() {
    let t = tree("l_failure.tree");
    let r = analyze(&t);
    let p1 = t.node_id("p1").unwrap();
    let pp2 = t.node_id("pp2").unwrap();
    assert_eq!(r.class(p1), NodeClass::UpDown);
    assert_eq!(r.l(p1), LStatus::Fails);
    assert!(r.is_good(p1));
    assert!(!r.negligible(&t, p1));
    assert_eq!(r.class(pp2), NodeClass::ArbitrageTypeII);
    let failing: Vec<&str> = t
        .nodes()
        .filter(|v| r.l(*v) == LStatus::Fails)
        .map(|v| t.label(v))
        .collect();
    assert_eq!(failing, vec!["p1", "pp2"]);
    assert!(!r.l_ae);
    assert!(!r.l_ae_witness.is_empty());
    assert_eq!(good_nodes(&t), good_nodes_by_paths(&t));
}
