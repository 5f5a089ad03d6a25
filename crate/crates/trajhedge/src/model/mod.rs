//! Trajectory sets, payoffs, portfolios and stopping times.
//!
//! A [`TrajectoryTree`] describes a set of price paths that all start at a
//! common `s0` and stay constant from a common horizon `T` on. Branching is
//! either explicit (one child per rational increment) or parametric: a
//! [`Family`] stands for the countable children with increments `p(1/n)`,
//! `n ≥ n0`, each continuing constantly. Quantities living on family members
//! are polynomials in `t = 1/n`.

mod parse;
mod payoff;
mod stopping;
mod strategy;
mod tree;

pub use parse::{parse_payoff, parse_process, parse_tree, write_payoff, write_process, write_tree};
pub use payoff::{PayoffSpec, ProcessSequence};
pub use stopping::{stopped_process, supermartingale_transform, StoppingTime};
pub use strategy::{slot_increment, wealth, HedgeSequence, SimpleStrategy, Wealth};
pub use tree::{ChildRef, ChildSigns, Endpoint, Family, FamilyId, Node, NodeId, Slot, TrajectoryTree, TreeBuilder};

/// Errors raised while building or querying the model.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("duplicate increment {increment} at node `{node}`")]
    DuplicateIncrement { node: String, increment: String },
    #[error("horizon mismatch: {0}")]
    HorizonMismatch(String),
    #[error("family `{family}` has degree {degree} > 4")]
    FamilyDegree { family: String, degree: usize },
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("unknown family `{0}`")]
    UnknownFamily(String),
    #[error("payoff does not cover {0}")]
    Uncovered(String),
    #[error("node `{node}` is before the strategy start time {start}")]
    BeforeStart { node: String, start: usize },
    #[error("negative transform weight at {0}")]
    NegativeEntry(String),
    #[error("not representable: {0}")]
    NotRepresentable(String),
    #[error("invalid model: {0}")]
    Invalid(String),
}
