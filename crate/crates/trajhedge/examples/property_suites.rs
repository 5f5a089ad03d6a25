//! Seeded randomized property suites over generated trees.
//!
//! ```text
//! cargo run --release --example property_suites -- [seed] [count]
//! ```

use std::time::Instant;

use trajhedge::suites;

fn main() {
    let mut args = std::env::args().skip(1);
    let seed: u64 = args.next().map(|s| s.parse().expect("seed is an integer")).unwrap_or(1);
    let count: usize = args
        .next()
        .map(|s| s.parse().expect("count is an integer"))
        .unwrap_or(200);
    let runs: [fn(u64, usize) -> suites::SuiteReport; 5] = [
        suites::decomposition_round_trip,
        suites::operator_identities,
        suites::duality,
        suites::hypothesis_soundness,
        suites::martingale_floor,
    ];
    let mut failed = false;
    for suite in runs {
        let start = Instant::now();
        let report = suite(seed, count);
        println!("{report} [{:.2?}]", start.elapsed());
        failed |= !report.passed();
    }
    if failed {
        std::process::exit(1);
    }
}
