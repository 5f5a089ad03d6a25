//! Classify the nodes of a trajectory set, decide property (L) and check the
//! structural hypotheses.
//!
//! ```text
//! cargo run --example analyze_tree
//! ```

use trajhedge::analysis::analyze;
use trajhedge::corpus;
use trajhedge::model::parse_tree;

fn main() {
    for name in ["no_martingale_measure.tree", "l_failure.tree"] {
        let tree = parse_tree(corpus::file(name)).expect("bundled tree parses");
        let report = analyze(&tree);
        println!("== {name}");
        for node in &report.nodes {
            println!(
                "  {:<4} t={} class={:<13} (L) {:?}",
                node.label,
                node.time,
                node.class.to_string(),
                node.l_status
            );
        }
        let h = &report.hypotheses;
        for v in [&h.h1, &h.h2, &h.h3, &h.h4, &h.h5] {
            println!("  {}: {}", v.name, if v.holds { "holds" } else { "fails" });
        }
        println!("  (L) almost everywhere: {}", report.l_ae);
        for w in &report.l_ae_witness {
            println!("    {w}");
        }
    }
}
