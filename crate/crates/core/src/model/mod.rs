//! Domain model: beliefs, value functions, belief densities, experiments,
//! Bayesian updating, and the buyer surplus function.

pub mod belief;
pub mod density;
pub mod experiment;
pub mod surplus;
pub mod value;

pub use belief::Belief;
pub use density::BeliefDensity;
pub use experiment::{ExperimentKind, GeneralExperiment, Orientation, SimpleExperiment};
pub use surplus::{
    belief_of_type, buyer_best_contract, delta_v, delta_v_mu, delta_v_noise, BeliefOfTypeResult,
    ContractChoice, MenuContract,
};
pub use value::{concave_hull, value_from_actions, ActionTable, ConcaveHull, ValueFunction};
