use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use trajhedge::cli::{run, Command, Mutation, OracleCheck, OutputMode, RunConfig};
use trajhedge::num::{parse_q, Q};
use trajhedge::pricing::Operator;

#[derive(Parser)]
#[command(
    name = "trajhedge",
    version,
    about = "Superhedging prices, null sets and decompositions on trajectory sets"
)]
struct Cli {
    /// Emit machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Closing tolerance for programs over families (explicit trees are exact).
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Op {
    Sigma,
    Ibar,
}

#[derive(Clone, Copy, ValueEnum)]
enum Check {
    Dual,
    Grid,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mutate {
    Waivers,
    Nonnegativity,
}

fn rational(s: &str) -> Result<Q, String> {
    parse_q(s)
}

#[derive(Subcommand)]
enum Cmd {
    /// Classify every node and decide (L).
    Classify { tree: PathBuf },
    /// Full analysis: classes, (L), hypotheses and the null cover.
    Analyze { tree: PathBuf },
    /// Price a payoff with the outer integral or the null operator.
    Price {
        #[arg(long, value_enum, default_value = "sigma")]
        op: Op,
        #[arg(long)]
        node: Option<String>,
        tree: PathBuf,
        payoff: PathBuf,
    },
    /// Doob decomposition of a supermartingale.
    Decompose {
        tree: PathBuf,
        process: PathBuf,
        /// Slacks, one per date or a single value used for every date.
        #[arg(long, value_delimiter = ',', value_parser = rational, required = true)]
        delta: Vec<Q>,
    },
    /// Verify a decomposition document.
    VerifyDecomp {
        tree: PathBuf,
        process: PathBuf,
        decomposition: PathBuf,
    },
    /// Compare the engine with an independent oracle on an explicit tree.
    Oracle {
        #[arg(long, value_enum)]
        check: Check,
        #[arg(long)]
        node: Option<String>,
        /// Grid step for `--check grid`.
        #[arg(long, value_parser = rational, default_value = "1/8")]
        step: Q,
        tree: PathBuf,
        payoff: PathBuf,
    },
    /// Recompute every value of the bundled examples.
    Corpus {
        /// Run with a deliberately weakened engine (expected to FAIL).
        #[arg(long, value_enum)]
        mutate: Option<Mutate>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = match cli.command {
        Cmd::Classify { tree } => Command::Classify { tree },
        Cmd::Analyze { tree } => Command::Analyze { tree },
        Cmd::Price { op, node, tree, payoff } => Command::Price {
            tree,
            payoff,
            op: match op {
                Op::Sigma => Operator::SigmaBar,
                Op::Ibar => Operator::IBar,
            },
            node,
        },
        Cmd::Decompose { tree, process, delta } => Command::Decompose {
            tree,
            process,
            deltas: delta,
        },
        Cmd::VerifyDecomp {
            tree,
            process,
            decomposition,
        } => Command::VerifyDecomp {
            tree,
            process,
            decomposition,
        },
        Cmd::Oracle {
            check,
            node,
            step,
            tree,
            payoff,
        } => Command::Oracle {
            check: match check {
                Check::Dual => OracleCheck::Dual,
                Check::Grid => OracleCheck::Grid,
            },
            tree,
            payoff,
            node,
            step,
        },
        Cmd::Corpus { mutate } => Command::Corpus {
            mutation: mutate.map(|m| match m {
                Mutate::Waivers => Mutation::NoWaivers,
                Mutate::Nonnegativity => Mutation::NoNonnegativity,
            }),
        },
    };
    let cfg = RunConfig {
        command,
        tolerance: cli.tolerance,
        output: if cli.json { OutputMode::Json } else { OutputMode::Text },
    };
    let out = run(&cfg);
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    ExitCode::from(out.code as u8)
}
