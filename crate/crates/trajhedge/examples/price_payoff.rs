//! Superhedging price and null-operator value of a payoff on a tree whose
//! branches include countable families, with the certifying strategy.
//!
//! ```text
//! cargo run --example price_payoff
//! ```

use trajhedge::analysis::analyze;
use trajhedge::corpus;
use trajhedge::model::{parse_payoff, parse_tree, wealth, Slot};
use trajhedge::num::fmt_q;
use trajhedge::pricing::{i_bar, sigma_bar, PricingConfig};

fn main() {
    let tree = parse_tree(corpus::file("no_martingale_measure.tree")).unwrap();
    let report = analyze(&tree);
    let f = parse_payoff(&tree, corpus::file("no_martingale_measure.payoff")).unwrap();
    let cfg = PricingConfig::default();

    let s = sigma_bar(&tree, &report, &f, tree.root(), &cfg).unwrap();
    println!(
        "outer integral: {} ({})",
        s.value,
        if s.attained { "attained" } else { "not attained" }
    );
    println!("  waived children: {:?}", s.waived);

    let i = i_bar(&tree, &report, &f, tree.root(), &cfg).unwrap();
    println!("null operator:  {}", i.value);
    if let Some(strategy) = &i.hedge {
        println!(
            "  certificate: V = {}, H0 = {}",
            fmt_q(&strategy.initial_capital),
            fmt_q(&strategy.hedge.at(Slot::Node(tree.root())).coeff(0))
        );
        for family in tree.families() {
            let slot = Slot::Family {
                family,
                time: tree.horizon(),
            };
            println!(
                "  wealth on {}: {}",
                tree.describe_slot(slot),
                wealth(&tree, strategy, slot).unwrap()
            );
        }
    }
}
