//! Independent oracles on explicit trees: martingale measures, the dual
//! price, a brute-force grid superhedge, and the coupled program for the
//! null operator.
//!
//! ```text
//! cargo run --example oracles
//! ```

use trajhedge::analysis::analyze;
use trajhedge::corpus;
use trajhedge::model::{parse_tree, PayoffSpec};
use trajhedge::num::{fmt_q, q, qi};
use trajhedge::oracle::{coupled_i_bar, dual_price, grid_superhedge, martingale_measures};
use trajhedge::poly::Poly;
use trajhedge::pricing::{sigma_bar, PricingConfig};

fn main() {
    // The explicit reduction of the example without a martingale measure.
    let t = parse_tree(corpus::file("no_martingale_measure.tree")).unwrap();
    let e = t.explicit_reduction(3).unwrap();
    println!(
        "measures without families kept: empty = {}",
        martingale_measures(&e, e.root()).unwrap().is_empty()
    );

    // Its variant with a constant path has exactly one.
    let v = parse_tree(corpus::file("point_mass_variant.tree"))
        .unwrap()
        .explicit_reduction(3)
        .unwrap();
    let ms = martingale_measures(&v, v.root()).unwrap();
    if let Some(m) = ms.unique(&v) {
        for (leaf, p) in m {
            println!("unique measure: P({}) = {}", v.label(leaf), fmt_q(&p));
        }
    }

    // A trinomial step: the dual price equals the outer integral, and the
    // grid superhedge approaches it from above.
    let tri = parse_tree(
        "tree s0=0 horizon=1\nnode r t=0\nnode a t=1\nnode b t=1\nnode c t=1\n\
         child r inc=1 -> a\nchild r inc=0 -> b\nchild r inc=-2 -> c\n",
    )
    .unwrap();
    let call = PayoffSpec::from_fns(&tri, 1, |n| tri.node(n).value.clone().max(qi(0)), |_| Poly::zero());
    let report = analyze(&tri);
    let sigma = sigma_bar(&tri, &report, &call, tri.root(), &PricingConfig::default()).unwrap();
    println!(
        "trinomial call: outer integral {}, dual {}",
        sigma.value,
        fmt_q(&dual_price(&tri, &call, tri.root()).unwrap())
    );
    for step in [q(1, 2), q(1, 8), q(1, 32)] {
        let g = grid_superhedge(&tri, &call, tri.root(), &qi(4), &step).unwrap();
        println!("  grid step {}: {}", fmt_q(&step), fmt_q(&g.value));
    }

    // The coupled program on the (L)-failure example.
    let lf = parse_tree(corpus::file("l_failure.tree"))
        .unwrap()
        .explicit_reduction(3)
        .unwrap();
    let pm2 = lf.node_id("pm2").unwrap();
    let ind = PayoffSpec::from_fns(&lf, 2, |n| if n == pm2 { qi(1) } else { qi(0) }, |_| Poly::zero());
    println!(
        "coupled null operator of the pm2 cylinder: {}",
        fmt_q(&coupled_i_bar(&lf, &analyze(&lf), &ind, lf.root()).unwrap())
    );
}
