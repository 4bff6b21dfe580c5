//! Pricing menus of statistical experiments for a privately informed buyer.
//!
//! A seller owns a binary signal (state `h` or `l`) and can sell any garbling
//! of it. A buyer holds a private belief `mu` that the state is `h` and values
//! information through a convex value-of-belief function `V`. This crate
//! computes the revenue-maximizing menu of experiments over a population of
//! buyer beliefs distributed with density `f`, prices it by the local
//! incentive-compatibility envelope, and certifies the result:
//!
//! - [`model`] — beliefs, value functions, belief densities, experiments,
//!   Bayesian updating, and the surplus function `ΔV`.
//! - [`assumptions`] — numerical checks of the regularity conditions the
//!   closed-form solution relies on (likelihood-ratio monotonicity,
//!   supermodularity / virtual-value monotonicity, single-crossing signs).
//! - [`solver`] — the threshold system, per-type first-order conditions,
//!   envelope price schedule, revenue, and the flat-price benchmark.
//! - [`oracle`] — exact finite screening: global IC/IR verification,
//!   shortest-path price maximization, brute-force assignment search.
//! - [`comparative`] — the dispersive order on symmetric belief densities and
//!   monotone comparative statics of the optimal menu.
//!
//! All numeric routines are deterministic; the only randomness (oracle local
//! search) is seeded explicitly.

pub mod assumptions;
pub mod comparative;
pub mod error;
pub mod model;
pub mod numeric;
pub mod oracle;
pub mod solver;

pub use error::Error;
pub use model::belief::Belief;
pub use model::density::BeliefDensity;
pub use model::experiment::{ExperimentKind, GeneralExperiment, Orientation, SimpleExperiment};
pub use model::surplus::MenuContract;
pub use model::value::ValueFunction;
pub use oracle::{DiscreteInstance, DiscreteMechanism};
pub use solver::{OptimalMenu, SolveOptions, ThresholdSet};

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
