//! Error type shared across the crate.

use crate::model::experiment::Orientation;

/// Errors produced by model construction, the solver, and the oracle.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// A signal that cannot realize at the given prior was conditioned on.
    #[error("signal {signal} has zero probability at prior {prior}")]
    ZeroProbabilitySignal { signal: usize, prior: f64 },

    /// A constructor or operation received an argument outside its domain.
    #[error("invalid {what}: {details}")]
    InvalidInput { what: &'static str, details: String },

    /// The operation needs a twice-differentiable value function.
    #[error("value function is not smooth: {operation} requires a C^2 value function")]
    UnsupportedValueKind { operation: &'static str },

    /// A posterior was requested on the wrong side of the prior for the
    /// experiment's orientation.
    #[error("posterior {nu} lies outside the admissible side for {orientation:?} at prior {mu}")]
    PosteriorOutsideBranch {
        nu: f64,
        mu: f64,
        orientation: Orientation,
    },

    /// A bracketed root search found no sign change.
    #[error(
        "no sign change for {equation} on [{lo}, {hi}] (f(lo)={flo:.6e}, f(hi)={fhi:.6e})"
    )]
    ThresholdNotFound {
        equation: &'static str,
        lo: f64,
        hi: f64,
        flo: f64,
        fhi: f64,
    },

    /// The multiplier search over the lambda bracket failed.
    #[error("multiplier not solved: {trace}")]
    MultiplierNotSolved { trace: String },

    /// Regularity checks failed and the caller did not override them.
    #[error("assumption checks failed: {summary}")]
    AssumptionsFailed { summary: String },

    /// Exhaustive enumeration was requested but exceeds the budget.
    #[error("enumeration requires {required:.3e} assignments, above the budget of {budget}")]
    BudgetExceeded { budget: u64, required: f64 },

    /// Fixed-assignment pricing is infeasible (negative IC cycle).
    #[error("infeasible assignment: negative incentive cycle involving type {type_index}")]
    InfeasibleAssignment { type_index: usize },
}

impl Error {
    pub(crate) fn invalid(what: &'static str, details: impl Into<String>) -> Self {
        Error::InvalidInput {
            what,
            details: details.into(),
        }
    }
}
