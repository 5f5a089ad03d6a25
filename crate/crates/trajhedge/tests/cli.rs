use std::fs;
use std::path::PathBuf;

use trajhedge::cli::{run, Command, Mutation, OracleCheck, OutputMode, RunConfig};
use trajhedge::num::q;
use trajhedge::pricing::Operator;

fn corpus(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus").join(name)
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("trajhedge-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    fs::write(&path, contents).unwrap();
    path
}

fn text(command: Command) -> RunConfig {
    RunConfig {
        command,
        tolerance: None,
        output: OutputMode::Text,
    }
}

#[test]
fn corpus_passes_and_mutations_fail() {
    let ok = run(&text(Command::Corpus { mutation: None }));
    assert_eq!(ok.code, 0, "{}", ok.stdout);
    assert!(ok.stdout.contains("0 failures"));

    let waivers = run(&text(Command::Corpus {
        mutation: Some(Mutation::NoWaivers),
    }));
    assert_eq!(waivers.code, 1);
    let c09 = waivers.stdout.lines().find(|l| l.starts_with("C09")).unwrap();
    assert!(c09.contains("FAIL") && c09.contains("computed: 1/2"), "{c09}");

    let nonneg = run(&text(Command::Corpus {
        mutation: Some(Mutation::NoNonnegativity),
    }));
    assert_eq!(nonneg.code, 1);
    let c11 = nonneg.stdout.lines().find(|l| l.starts_with("C11")).unwrap();
    assert!(c11.contains("FAIL") && c11.contains("computed: 0"), "{c11}");
}

#[test]
fn sigma_bar_reports_non_attainment() {
    let out = run(&text(Command::Price {
        tree: corpus("no_martingale_measure.tree"),
        payoff: corpus("no_martingale_measure.payoff"),
        op: Operator::SigmaBar,
        node: None,
    }));
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(out.stdout.contains("0 (not attained)"), "{}", out.stdout);
}

#[test]
fn decompose_then_verify_round_trip() {
    let (tree, process) = (
        corpus("no_martingale_measure.tree"),
        corpus("no_martingale_measure.process"),
    );
    let dec = run(&text(Command::Decompose {
        tree: tree.clone(),
        process: process.clone(),
        deltas: vec![q(1, 10)],
    }));
    assert_eq!(dec.code, 0, "{}", dec.stderr);
    let path = scratch("round_trip.decomp", &dec.stdout);
    let ver = run(&text(Command::VerifyDecomp {
        tree: tree.clone(),
        process: process.clone(),
        decomposition: path,
    }));
    assert_eq!(ver.code, 0, "{}", ver.stdout);
    assert!(ver.stdout.starts_with("PASS"));

    // Tampering with the compensator is detected.
    let tampered: String = dec
        .stdout
        .lines()
        .map(|l| {
            if l.starts_with("alpha-family down 1") {
                "alpha-family down 1 poly=-5".to_string()
            } else {
                l.to_string()
            }
        })
        .collect::<Vec<_>>()
        .join("\n");
    let path = scratch("tampered.decomp", &tampered);
    let ver = run(&text(Command::VerifyDecomp {
        tree,
        process,
        decomposition: path,
    }));
    assert_eq!(ver.code, 1);
    assert!(ver.stdout.starts_with("FAIL"));
}

#[test]
fn decomposition_refused_without_l_ae() {
    let out = run(&text(Command::Decompose {
        tree: corpus("l_failure.tree"),
        process: corpus("l_failure.process"),
        deltas: vec![q(1, 2)],
    }));
    assert_eq!(out.code, 1);
    assert!(out.stdout.contains("(L)"), "{}", out.stdout);
}

#[test]
fn malformed_tree_reports_location() {
    let bad = scratch("bad.tree", "tree s0=1 horizon=1\nnode r t=0\nchild r inc=x -> a\n");
    let out = run(&text(Command::Classify { tree: bad.clone() }));
    assert_eq!(out.code, 2);
    let expected = format!("{}:3:13", bad.display());
    assert!(out.stderr.contains(&expected), "{}", out.stderr);

    let missing = run(&text(Command::Analyze {
        tree: corpus("does_not_exist.tree"),
    }));
    assert_eq!(missing.code, 2);
}

#[test]
fn oracle_rejects_families_and_checks_explicit_trees() {
    let out = run(&text(Command::Oracle {
        check: OracleCheck::Dual,
        tree: corpus("no_martingale_measure.tree"),
        payoff: corpus("no_martingale_measure.payoff"),
        node: None,
        step: q(1, 8),
    }));
    assert_eq!(out.code, 2);

    let tree = scratch(
        "binary.tree",
        "tree s0=1 horizon=1\nnode r t=0\nnode a t=1\nnode b t=1\nchild r inc=1 -> a\nchild r inc=-1 -> b\n",
    );
    let payoff = scratch("call.payoff", "payoff maturity=1\nat a = 1\nat b = 0\n");
    for check in [OracleCheck::Dual, OracleCheck::Grid] {
        let out = run(&text(Command::Oracle {
            check,
            tree: tree.clone(),
            payoff: payoff.clone(),
            node: None,
            step: q(1, 8),
        }));
        assert_eq!(out.code, 0, "{check:?}: {}{}", out.stdout, out.stderr);
    }
}

#[test]
fn output_is_deterministic_and_json_mirrors_text() {
    let cfg = text(Command::Analyze {
        tree: corpus("no_martingale_measure.tree"),
    });
    assert_eq!(run(&cfg), run(&cfg));
    let json = run(&RunConfig {
        output: OutputMode::Json,
        ..cfg
    });
    assert_eq!(json.code, 0);
    let v: serde_json::Value = serde_json::from_str(&json.stdout).unwrap();
    assert!(v.is_object());

    let corpus_cfg = RunConfig {
        output: OutputMode::Json,
        ..text(Command::Corpus { mutation: None })
    };
    assert_eq!(run(&corpus_cfg).stdout, run(&corpus_cfg).stdout);
}
