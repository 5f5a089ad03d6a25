//! Command pipeline behind the `trajhedge` binary. [`run`] never prints; it
//! returns the report and the exit status (0 success or PASS, 1 FAIL verdict,
//! 2 input error).

mod regression;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num_traits::Signed;
use serde_json::{json, Value};

pub use regression::{corpus_entries, CorpusEntry};

use crate::analysis::{analyze, AnalysisReport};
use crate::decomposition::{doob_decompose, parse_decomposition, verify_decomposition, write_decomposition};
use crate::model::{
    parse_payoff, parse_process, parse_tree, HedgeSequence, ModelError, NodeId, PayoffSpec, TrajectoryTree,
};
use crate::num::{fmt_q, Q};
use crate::oracle::{dual_price, grid_superhedge};
use crate::pricing::{price, Operator, PriceResult, PricingConfig};
use crate::pwl::Direction;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputMode {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleCheck {
    Dual,
    Grid,
}

/// A deliberately weakened engine, used to show that the corpus detects it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mutation {
    NoWaivers,
    NoNonnegativity,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Command {
    Classify {
        tree: PathBuf,
    },
    Analyze {
        tree: PathBuf,
    },
    Price {
        tree: PathBuf,
        payoff: PathBuf,
        op: Operator,
        node: Option<String>,
    },
    Decompose {
        tree: PathBuf,
        process: PathBuf,
        deltas: Vec<Q>,
    },
    VerifyDecomp {
        tree: PathBuf,
        process: PathBuf,
        decomposition: PathBuf,
    },
    Oracle {
        check: OracleCheck,
        tree: PathBuf,
        payoff: PathBuf,
        node: Option<String>,
        step: Q,
    },
    Corpus {
        mutation: Option<Mutation>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    /// Closing tolerance for semi-infinite programs; ignored on explicit
    /// trees, which are always solved exactly.
    pub tolerance: Option<f64>,
    pub output: OutputMode,
}

/// Exit status and rendered report.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// A successful command: text lines, a machine-readable mirror and a verdict.
struct Report {
    text: String,
    json: Value,
    pass: bool,
}

fn read(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn located(path: &Path, e: ModelError) -> String {
    match e {
        ModelError::Syntax { line, column, message } => format!("{}:{line}:{column}: {message}", path.display()),
        other => format!("{}: {other}", path.display()),
    }
}

fn load_tree(path: &Path) -> Result<TrajectoryTree, String> {
    parse_tree(&read(path)?).map_err(|e| located(path, e))
}

fn load_payoff(tree: &TrajectoryTree, path: &Path) -> Result<PayoffSpec, String> {
    parse_payoff(tree, &read(path)?).map_err(|e| located(path, e))
}

fn node_arg(tree: &TrajectoryTree, node: &Option<String>) -> Result<NodeId, String> {
    match node {
        None => Ok(tree.root()),
        Some(l) => tree.node_id(l).map_err(|e| e.to_string()),
    }
}

fn pricing_config(cfg: &RunConfig, tree: &TrajectoryTree) -> PricingConfig {
    let mut p = PricingConfig::default();
    if let (Some(t), true) = (cfg.tolerance, tree.has_families()) {
        p.tolerance = t;
    }
    p
}

fn fmt_hedge(tree: &TrajectoryTree, h: &HedgeSequence) -> Vec<String> {
    let mut out: Vec<String> = h
        .explicit
        .iter()
        .map(|(v, x)| format!("{}={}", tree.label(*v), fmt_q(x)))
        .collect();
    out.extend(
        h.family
            .iter()
            .map(|((f, t), p)| format!("{}@{}={}", tree.family(*f).label, t, p.pretty())),
    );
    out
}

fn node_lines(tree: &TrajectoryTree, r: &AnalysisReport, out: &mut String) {
    for n in &r.nodes {
        let _ = writeln!(
            out,
            "{} {} {:?} {}",
            n.label,
            n.class,
            n.l_status,
            if n.good { "good" } else { "bad" }
        );
    }
    let _ = tree;
}

fn cover_json(tree: &TrajectoryTree, r: &AnalysisReport) -> Value {
    json!({
        "type_ii_shadows": r.null_cover.type_ii_shadows.iter().map(|v| tree.label(*v)).collect::<Vec<_>>(),
        "arbitrage_cylinders": r.null_cover.arb_increment_cylinders.iter()
            .map(|(v, c)| json!({"node": tree.label(*v), "child": tree.describe_child(*c)}))
            .collect::<Vec<_>>(),
    })
}

fn nodes_json(r: &AnalysisReport) -> Value {
    Value::Array(
        r.nodes
            .iter()
            .map(|n| {
                json!({
                    "id": n.label, "time": n.time, "value": fmt_q(&n.value), "class": n.class.to_string(),
                    "l_status": format!("{:?}", n.l_status), "good": n.good,
                })
            })
            .collect(),
    )
}

fn classify_cmd(path: &Path) -> Result<Report, String> {
    let tree = load_tree(path)?;
    let r = analyze(&tree);
    let mut text = String::new();
    node_lines(&tree, &r, &mut text);
    Ok(Report {
        text,
        json: json!({ "nodes": nodes_json(&r) }),
        pass: true,
    })
}

fn analyze_cmd(path: &Path) -> Result<Report, String> {
    let tree = load_tree(path)?;
    let r = analyze(&tree);
    let mut text = String::new();
    node_lines(&tree, &r, &mut text);
    let h = &r.hypotheses;
    for v in [&h.h1, &h.h2, &h.h3, &h.h4, &h.h5] {
        let _ = writeln!(
            text,
            "{}: {}{}",
            v.name,
            if v.holds { "holds" } else { "fails" },
            if v.witnesses.is_empty() {
                String::new()
            } else {
                format!(" ({})", v.witnesses.join("; "))
            }
        );
    }
    let _ = writeln!(text, "complete: {}", r.complete);
    let _ = writeln!(text, "l-a.e.: {}", r.l_ae);
    for w in &r.l_ae_witness {
        let _ = writeln!(text, "  {w}");
    }
    let _ = writeln!(text, "[null-cover]");
    for v in &r.null_cover.type_ii_shadows {
        let _ = writeln!(text, "shadow {}", tree.label(*v));
    }
    for (v, c) in &r.null_cover.arb_increment_cylinders {
        let _ = writeln!(text, "cylinder {} {}", tree.label(*v), tree.describe_child(*c));
    }
    let json = json!({
        "nodes": nodes_json(&r),
        "hypotheses": serde_json::to_value(&r.hypotheses).unwrap_or(Value::Null),
        "complete": r.complete,
        "l_ae": r.l_ae,
        "l_ae_witness": r.l_ae_witness,
        "null_cover": cover_json(&tree, &r),
    });
    Ok(Report { text, json, pass: true })
}

fn price_text(tree: &TrajectoryTree, p: &PriceResult) -> (String, Value) {
    let mut text = String::new();
    let attained = if p.attained { "attained" } else { "not attained" };
    let _ = writeln!(text, "operator: {}", p.operator);
    let _ = writeln!(text, "node: {}", tree.label(p.node));
    let _ = writeln!(text, "value: {} ({attained})", p.value);
    let drift = p.drift.map(|d| if d == Direction::Up { "up" } else { "down" });
    if let Some(d) = drift {
        let _ = writeln!(text, "drift: {d}");
    }
    let cert = p.hedge.as_ref().map(|s| {
        json!({
            "capital": fmt_q(&s.initial_capital),
            "start_time": s.start_time,
            "hedge": fmt_hedge(tree, &s.hedge),
        })
    });
    if let Some(s) = &p.hedge {
        let _ = writeln!(
            text,
            "certificate: capital {} hedge [{}]",
            fmt_q(&s.initial_capital),
            fmt_hedge(tree, &s.hedge).join(", ")
        );
    }
    let _ = writeln!(text, "active set: [{}]", p.active_set.join(", "));
    let _ = writeln!(text, "waived: [{}]", p.waived.join(", "));
    // Ī is computed over a single aggregated nonnegative strategy; countable
    // sums of strategies are not represented separately.
    let basis = match p.operator {
        Operator::IBar => Some("model value (single aggregated nonnegative strategy)"),
        Operator::SigmaBar => None,
    };
    if let Some(b) = basis {
        let _ = writeln!(text, "basis: {b}");
    }
    let json = json!({
        "basis": basis,
        "operator": p.operator.to_string(),
        "node": tree.label(p.node),
        "value": p.value,
        "attained": p.attained,
        "drift": drift,
        "certificate": cert,
        "active_set": p.active_set,
        "waived": p.waived,
        "rounds": p.rounds,
    });
    (text, json)
}

fn price_cmd(
    cfg: &RunConfig,
    tree: &Path,
    payoff: &Path,
    op: Operator,
    node: &Option<String>,
) -> Result<Report, String> {
    let t = load_tree(tree)?;
    let f = load_payoff(&t, payoff)?;
    let v = node_arg(&t, node)?;
    let r = analyze(&t);
    let p = price(&t, &r, &f, v, op, &pricing_config(cfg, &t)).map_err(|e| format!("{}: {e}", payoff.display()))?;
    let (text, json) = price_text(&t, &p);
    Ok(Report { text, json, pass: true })
}

fn decompose_cmd(cfg: &RunConfig, tree: &Path, process: &Path, deltas: &[Q]) -> Result<Report, String> {
    let t = load_tree(tree)?;
    let f = parse_process(&t, &read(process)?).map_err(|e| located(process, e))?;
    let r = analyze(&t);
    let deltas: Vec<Q> = match deltas {
        [one] => vec![one.clone(); t.horizon()],
        many => many.to_vec(),
    };
    match doob_decompose(&t, &r, &f, &deltas, &pricing_config(cfg, &t)) {
        Ok(d) => {
            let text = write_decomposition(&t, &d);
            let json = json!({
                "document": text,
                "exception_set": d.exception_set.iter().map(|e| format!("{e:?}")).collect::<Vec<_>>(),
                "hedge": fmt_hedge(&t, &d.hedge),
            });
            Ok(Report { text, json, pass: true })
        }
        Err(e) => Ok(Report {
            text: format!("FAIL: {e}\n"),
            json: json!({ "error": e.to_string() }),
            pass: false,
        }),
    }
}

fn verify_cmd(cfg: &RunConfig, tree: &Path, process: &Path, doc: &Path) -> Result<Report, String> {
    let t = load_tree(tree)?;
    let f = parse_process(&t, &read(process)?).map_err(|e| located(process, e))?;
    let d = parse_decomposition(&t, &read(doc)?).map_err(|e| located(doc, e))?;
    let r = analyze(&t);
    let v = verify_decomposition(&t, &r, &f, &d, &pricing_config(cfg, &t)).map_err(|e| e.to_string())?;
    let text = match &v.witness {
        None => format!("PASS ({} slots checked)\n", v.checked_slots),
        Some(w) => format!("FAIL: {w}\n"),
    };
    let json = json!({ "pass": v.valid, "witness": v.witness, "checked_slots": v.checked_slots });
    Ok(Report {
        text,
        json,
        pass: v.valid,
    })
}

fn oracle_cmd(
    cfg: &RunConfig,
    check: OracleCheck,
    tree: &Path,
    payoff: &Path,
    node: &Option<String>,
    step: &Q,
) -> Result<Report, String> {
    let t = load_tree(tree)?;
    let f = load_payoff(&t, payoff)?;
    let v = node_arg(&t, node)?;
    let r = analyze(&t);
    let engine = price(&t, &r, &f, v, Operator::SigmaBar, &pricing_config(cfg, &t)).map_err(|e| e.to_string())?;
    let s = engine
        .value
        .as_q()
        .cloned()
        .ok_or_else(|| format!("engine value {} is not a finite rational", engine.value))?;
    let (oracle, pass, extra) = match check {
        OracleCheck::Dual => {
            let d = dual_price(&t, &f, v).map_err(|e| e.to_string())?;
            (d.clone(), d == s, json!(null))
        }
        OracleCheck::Grid => {
            // Rounding each hedge to the grid costs at most step/2 · max|ΔS|
            // per date.
            let max_inc = t.nodes().map(|u| t.node(u).increment.abs()).max().unwrap_or_default();
            let dates = Q::from_integer((f.maturity.saturating_sub(t.node(v).time) as i64).into());
            let slack = step * &max_inc * dates / Q::from_integer(2.into());
            let spread = f.explicit.values().max().cloned().unwrap_or_default()
                - f.explicit.values().min().cloned().unwrap_or_default();
            let min_inc = t
                .nodes()
                .map(|u| t.node(u).increment.abs())
                .filter(|x| *x > Q::default())
                .min()
                .unwrap_or_else(|| Q::from_integer(1.into()));
            let bound = (spread * Q::from_integer(2.into()) / min_inc).ceil() + Q::from_integer(1.into());
            let g = grid_superhedge(&t, &f, v, &bound, step).map_err(|e| e.to_string())?;
            let ok = g.value >= s && g.value <= &s + &slack;
            (
                g.value,
                ok,
                json!({ "lipschitz_slack": fmt_q(&slack), "bound": fmt_q(&bound), "step": fmt_q(step) }),
            )
        }
    };
    let name = match check {
        OracleCheck::Dual => "dual",
        OracleCheck::Grid => "grid",
    };
    let text = format!(
        "{}: engine {} oracle({name}) {}\n",
        if pass { "PASS" } else { "FAIL" },
        fmt_q(&s),
        fmt_q(&oracle)
    );
    let json = json!({ "pass": pass, "check": name, "engine": fmt_q(&s), "oracle": fmt_q(&oracle), "grid": extra });
    Ok(Report { text, json, pass })
}

fn corpus_cmd(mutation: Option<Mutation>) -> Report {
    let mut cfg = PricingConfig::default();
    match mutation {
        Some(Mutation::NoWaivers) => cfg.waivers = false,
        Some(Mutation::NoNonnegativity) => cfg.nonnegativity = false,
        None => {}
    }
    let entries = corpus_entries(&cfg);
    let failures = entries.iter().filter(|e| !e.pass).count();
    let mut text = String::new();
    for e in &entries {
        let _ = writeln!(
            text,
            "{} {:<4} {:<22} {} | expected: {} | computed: {}",
            e.id,
            if e.pass { "PASS" } else { "FAIL" },
            e.example,
            e.item,
            e.expected,
            e.computed
        );
    }
    let _ = writeln!(text, "{} entries, {failures} failures", entries.len());
    let json = json!({ "entries": entries, "failures": failures });
    Report {
        text,
        json,
        pass: failures == 0,
    }
}

/// Runs one command.
pub fn run(cfg: &RunConfig) -> Outcome {
    let result = match &cfg.command {
        Command::Classify { tree } => classify_cmd(tree),
        Command::Analyze { tree } => analyze_cmd(tree),
        Command::Price { tree, payoff, op, node } => price_cmd(cfg, tree, payoff, *op, node),
        Command::Decompose { tree, process, deltas } => decompose_cmd(cfg, tree, process, deltas),
        Command::VerifyDecomp {
            tree,
            process,
            decomposition,
        } => verify_cmd(cfg, tree, process, decomposition),
        Command::Oracle {
            check,
            tree,
            payoff,
            node,
            step,
        } => oracle_cmd(cfg, *check, tree, payoff, node, step),
        Command::Corpus { mutation } => Ok(corpus_cmd(*mutation)),
    };
    match result {
        Ok(r) => Outcome {
            code: if r.pass { 0 } else { 1 },
            stdout: match cfg.output {
                OutputMode::Text => r.text,
                OutputMode::Json => {
                    let mut s = serde_json::to_string_pretty(&r.json).unwrap_or_default();
                    s.push('\n');
                    s
                }
            },
            stderr: String::new(),
        },
        Err(e) => Outcome {
            code: 2,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}
