//! Doob decomposition of a trajectorial supermartingale: exception set,
//! hedge, compensator, verification and the text round trip.
//!
//! ```text
//! cargo run --example decompose
//! ```

use trajhedge::analysis::analyze;
use trajhedge::corpus;
use trajhedge::decomposition::{
    check_supermartingale, doob_decompose, martingale_floor_check, parse_decomposition, verify_decomposition,
    write_decomposition,
};
use trajhedge::model::{parse_process, parse_tree};
use trajhedge::num::q;
use trajhedge::pricing::PricingConfig;

fn main() {
    let cfg = PricingConfig::default();
    let tree = parse_tree(corpus::file("no_martingale_measure.tree")).unwrap();
    let report = analyze(&tree);
    let f = parse_process(&tree, corpus::file("no_martingale_measure.process")).unwrap();

    let sm = check_supermartingale(&tree, &report, &f, &cfg).unwrap();
    println!("supermartingale: {}", sm.holds);

    for delta in [q(1, 10), q(1, 1000)] {
        let dec = doob_decompose(&tree, &report, &f, &vec![delta.clone(); tree.horizon()], &cfg).unwrap();
        let text = write_decomposition(&tree, &dec);
        println!("--- δ = {delta}\n{text}");
        let back = parse_decomposition(&tree, &text).unwrap();
        let verdict = verify_decomposition(&tree, &report, &f, &back, &cfg).unwrap();
        println!("verified: {} ({} slots)", verdict.valid, verdict.checked_slots);
        let floor = martingale_floor_check(&tree, &report, &f, &back);
        println!(
            "martingale floor: {} {}",
            floor.status,
            floor.reason.unwrap_or_default()
        );
    }
}
