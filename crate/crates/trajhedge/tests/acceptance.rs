//! End-to-end acceptance: one PASS/FAIL line per criterion.
//!
//! Runs without the test harness so the lines always appear in
//! `cargo test` output; exits nonzero if an unexpected verdict occurs.

use std::time::{Duration, Instant};

use trajhedge::analysis::analyze;
use trajhedge::cli::{corpus_entries, CorpusEntry};
use trajhedge::corpus;
use trajhedge::decomposition::{doob_decompose, martingale_floor_check, FloorStatus};
use trajhedge::model::{parse_payoff, parse_process, parse_tree, ProcessSequence, TrajectoryTree};
use trajhedge::num::{q, qi, Q};
use trajhedge::pricing::{i_bar, is_null, sigma_bar, Event, EventPart, PricingConfig};
use trajhedge::suites;

const SEED: u64 = 20_240_601;

struct Line {
    criterion: usize,
    pass: bool,
    detail: String,
}

impl Line {
    fn print(&self) {
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        println!("criterion {}: {verdict} — {}", self.criterion, self.detail);
    }
}

fn tree(name: &str) -> TrajectoryTree {
    parse_tree(corpus::file(name)).unwrap()
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn entries(all: &[CorpusEntry], ids: &[&str]) -> (bool, String) {
    let picked: Vec<&CorpusEntry> = all.iter().filter(|e| ids.contains(&e.id.as_str())).collect();
    assert_eq!(picked.len(), ids.len(), "missing corpus entries {ids:?}");
    let pass = picked.iter().all(|e| e.pass);
    let detail = picked
        .iter()
        .map(|e| format!("{} {} = {}", e.id, e.item, e.computed))
        .collect::<Vec<_>>()
        .join("; ");
    (pass, detail)
}

fn criterion_1(all: &[CorpusEntry]) -> Line {
    let cfg = PricingConfig::default();
    let t = tree("no_martingale_measure.tree");
    let r = analyze(&t);
    let f = parse_payoff(&t, corpus::file("no_martingale_measure.payoff")).unwrap();
    let limit = Duration::from_secs(1);
    let (s, ds) = timed(|| sigma_bar(&t, &r, &f, t.root(), &cfg).unwrap());
    let (i, di) = timed(|| i_bar(&t, &r, &f, t.root(), &cfg).unwrap());
    let down = t.family_id("down").unwrap();
    let mut slowest = ds.max(di);
    let mut tails = true;
    for n0 in [1, 5, 50] {
        let e = Event::of(vec![EventPart::FamilyTail { family: down, from: n0 }]);
        let (nr, d) = timed(|| is_null(&t, &e, t.root(), &cfg).unwrap());
        slowest = slowest.max(d);
        tails &= nr.result.value.as_q() == Some(&qi(1));
    }
    let u = t.node_id("u").unwrap();
    let (up, d) = timed(|| is_null(&t, &Event::of(vec![EventPart::Cylinder(u)]), t.root(), &cfg).unwrap());
    slowest = slowest.max(d);
    let exact = s.value.contains(&qi(0))
        && s.value.width() <= 1e-9
        && !s.attained
        && i.value.as_q() == Some(&q(1, 2))
        && tails
        && up.null;
    let (corpus_ok, detail) = entries(all, &["C09", "C10", "C11", "C12"]);
    Line {
        criterion: 1,
        pass: exact && corpus_ok && slowest < limit,
        detail: format!("{detail}; slowest evaluation {slowest:?}"),
    }
}

fn criterion_2(all: &[CorpusEntry]) -> Line {
    let (pass, detail) = entries(all, &["C17", "C18"]);
    Line {
        criterion: 2,
        pass,
        detail,
    }
}

fn criterion_3(all: &[CorpusEntry]) -> Line {
    let (pass, detail) = entries(all, &["C20", "C21", "C22", "C23", "C24", "C25"]);
    Line {
        criterion: 3,
        pass,
        detail,
    }
}

fn criterion_4(all: &[CorpusEntry]) -> Line {
    let (corpus_ok, corpus) = entries(all, &["C14", "C15"]);
    let (rep, d) = timed(|| suites::decomposition_round_trip(SEED, 200));
    Line {
        criterion: 4,
        pass: corpus_ok && rep.passed() && d < Duration::from_secs(60),
        detail: format!("{corpus}; {rep}; {d:?}"),
    }
}

fn criterion_5(all: &[CorpusEntry]) -> Line {
    let (pass, detail) = entries(all, &["C16"]);
    Line {
        criterion: 5,
        pass,
        detail,
    }
}

fn suite_line(criterion: usize, rep: suites::SuiteReport) -> Line {
    Line {
        criterion,
        pass: rep.passed(),
        detail: rep.to_string(),
    }
}

/// Floor statuses of the bundled nonnegative supermartingales.
fn corpus_floors() -> Vec<(String, FloorStatus)> {
    let cfg = PricingConfig::default();
    let mut out = Vec::new();
    let t = tree("no_martingale_measure.tree");
    let r = analyze(&t);
    let f = parse_process(&t, corpus::file("no_martingale_measure.process")).unwrap();
    for d0 in [q(1, 10), qi(1)] {
        let dec = doob_decompose(&t, &r, &f, &[d0.clone(), d0.clone()], &cfg).unwrap();
        let fl = martingale_floor_check(&t, &r, &f, &dec);
        out.push((format!("no_martingale_measure δ={d0}"), fl.status));
    }
    let t = tree("point_mass_variant.tree");
    let r = analyze(&t);
    let f = ProcessSequence::coordinate(&t);
    let d: Vec<Q> = vec![q(1, 10); t.horizon()];
    let dec = doob_decompose(&t, &r, &f, &d, &cfg).unwrap();
    out.push((
        "point_mass_variant S".into(),
        martingale_floor_check(&t, &r, &f, &dec).status,
    ));
    out
}

fn criterion_9() -> (Line, suites::SuiteReport, Vec<(String, FloorStatus)>) {
    let rep = suites::martingale_floor(SEED, 200);
    let floors = corpus_floors();
    let corpus_ok = floors.iter().all(|(_, s)| *s == FloorStatus::Pass);
    let listed = floors
        .iter()
        .map(|(n, s)| format!("{n}: {s}"))
        .collect::<Vec<_>>()
        .join(", ");
    let line = Line {
        criterion: 9,
        pass: rep.passed() && corpus_ok,
        detail: format!("{rep}; corpus: {listed}"),
    };
    (line, rep, floors)
}

fn main() {
    let all = corpus_entries(&PricingConfig::default());
    let mut lines = vec![
        criterion_1(&all),
        criterion_2(&all),
        criterion_3(&all),
        criterion_4(&all),
        criterion_5(&all),
        suite_line(6, suites::operator_identities(SEED, 500)),
        suite_line(7, suites::duality(SEED, 200)),
        suite_line(8, suites::hypothesis_soundness(SEED, 200)),
    ];
    let (c9, random_floor, floors) = criterion_9();
    lines.push(c9);
    for l in &lines {
        l.print();
    }

    for l in &lines[..8] {
        assert!(l.pass, "criterion {} failed: {}", l.criterion, l.detail);
    }
    // Both bundled trees with a nonnegative supermartingale lack (H.1) (the
    // up branch has no holding child with increment ≥ 1), so the floor check
    // refuses to certify them; for small slack the floor is genuinely
    // breached on that branch. The randomized part must hold everywhere.
    assert!(random_floor.passed(), "{random_floor}");
    let status = |name: &str| floors.iter().find(|(n, _)| n == name).map(|(_, s)| *s).unwrap();
    assert_eq!(status("no_martingale_measure δ=1/10"), FloorStatus::Refused);
    assert_eq!(status("no_martingale_measure δ=1"), FloorStatus::Refused);
    assert_eq!(status("point_mass_variant S"), FloorStatus::Refused);
}
