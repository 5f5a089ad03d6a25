//! Conditional superhedging prices `σ̄_j` and the null-set functional `Ī_j`.
//!
//! Both are computed by backward induction of the one-step kernel in
//! [`onestep`]. `σ̄` drops the domination requirement on trajectories in the
//! null cover and assigns `−∞` at nodes where property (L) fails. `Ī`
//! keeps wealth nonnegative at every date up to the horizon and only waives
//! the terminal requirement on covered trajectories.

mod induction;
pub mod onestep;
mod ops;

use thiserror::Error;

use crate::model::ModelError;
use crate::num::Q;

pub use induction::{i_bar, price, sigma_bar, verify_certificate, Operator, PriceResult};
pub use onestep::{Bounds, Constraint, FamilyTerm, Feasibility, StepConfig, StepProgram, StepSolution};
pub use ops::{
    abs_payoff, check_integrable, indicator, is_null, norm_j, sigma_bar_at_time, tower_check, Event, EventPart,
    IntegrabilityReport, NullReport, TowerReport,
};

/// Knobs of the pricing engine. The defaults are the production settings;
/// the switches exist so that tests can show what each ingredient is for.
#[derive(Clone, Debug, PartialEq)]
pub struct PricingConfig {
    /// Waive covered trajectories and propagate `−∞` at (L)-failing nodes.
    pub waivers: bool,
    /// Keep `Ī`'s wealth nonnegative at intermediate dates.
    pub nonnegativity: bool,
    pub step: StepConfig,
    /// Acceptance width for programs with families.
    pub tolerance: f64,
}

impl Default for PricingConfig {
    fn default() -> Self {
        PricingConfig {
            waivers: true,
            nonnegativity: true,
            step: StepConfig::default(),
            tolerance: 1e-9,
        }
    }
}

#[derive(Debug, Error)]
pub enum PricingError {
    #[error("property (L) is undecided on the evaluation path at: {}", nodes.join(", "))]
    Undecided { nodes: Vec<String> },
    #[error("pricing needs a trajectorially complete tree; `{0}` carries an unbounded-constancy tail")]
    Incomplete(String),
    #[error("negative payoff given to the nonnegative operator at {0}")]
    NegativePayoff(String),
    #[error("exchange method did not converge at {context}: value in [{lo}, {hi}] after {rounds} rounds")]
    Unconverged {
        context: String,
        lo: Q,
        hi: String,
        rounds: usize,
    },
    #[error("certificate check failed: {0}")]
    Certificate(String),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}
