//! Null events and seminorms: the type II branch is null, family tails are
//! not, and a node where (L) fails carries positive mass.
//!
//! ```text
//! cargo run --example null_sets
//! ```

use trajhedge::corpus;
use trajhedge::model::{parse_payoff, parse_tree};
use trajhedge::pricing::{is_null, norm_j, Event, EventPart, PricingConfig};

fn main() {
    let cfg = PricingConfig::default();

    let tree = parse_tree(corpus::file("no_martingale_measure.tree")).unwrap();
    let u = tree.node_id("u").unwrap();
    let up = is_null(&tree, &Event::of(vec![EventPart::Cylinder(u)]), tree.root(), &cfg).unwrap();
    println!("branch through u: null = {} (value {})", up.null, up.result.value);
    let down = tree.family_id("down").unwrap();
    for n0 in [1, 5, 50] {
        let tail = Event::of(vec![EventPart::FamilyTail { family: down, from: n0 }]);
        let r = is_null(&tree, &tail, tree.root(), &cfg).unwrap();
        println!("down tail from n = {n0}: null = {} (value {})", r.null, r.result.value);
    }

    let variant = parse_tree(corpus::file("point_mass_variant.tree")).unwrap();
    for (label, file) in [
        ("S0", "point_mass_variant_zero.payoff"),
        ("S-", "point_mass_variant_down.payoff"),
    ] {
        let g = parse_payoff(&variant, corpus::file(file)).unwrap();
        println!(
            "norm of the indicator of {label}: {}",
            norm_j(&variant, &g, variant.root(), &cfg).unwrap().value
        );
    }

    let lf = parse_tree(corpus::file("l_failure.tree")).unwrap();
    let pm2 = lf.node_id("pm2").unwrap();
    let r = is_null(&lf, &Event::of(vec![EventPart::Cylinder(pm2)]), lf.root(), &cfg).unwrap();
    println!(
        "cylinder pm2 on the (L)-failure tree: null = {} (value {})",
        r.null, r.result.value
    );
}
