//! Superhedging on trajectory sets: model-free pricing of payoffs on price
//! trees whose branching may include countable families of paths.
//!
//! - [`model`]: trees, payoffs, hedges, stopping times and the text format.
//! - [`analysis`]: node classes, property (L), the null cover and the
//!   structural hypotheses.
//! - [`pricing`]: the outer integral `σ̄` and the null operator `Ī` by exact
//!   backward induction, null events and seminorms.
//! - [`decomposition`]: Doob decompositions of trajectorial supermartingales.
//! - [`oracle`]: independent cross-checks on explicit trees.
//! - [`cli`]: the command pipeline behind the `trajhedge` binary.

pub mod analysis;
pub mod cli;
pub mod corpus;
pub mod decomposition;
pub mod generate;
pub mod lp;
pub mod model;
pub mod num;
pub mod oracle;
pub mod poly;
pub mod pricing;
pub mod pwl;
pub mod suites;
