//! The buyer surplus function `ΔV` and contract choice.
//!
//! For a simple experiment the surplus of a buyer with belief `mu` has a
//! closed two-branch form. With `m` the probability of the noisy signal and
//! `nu` the belief it induces:
//!
//! ```text
//! reveal-h, noise p:  m = mu (1-p) + (1-mu),   nu = mu (1-p) / m
//!                     ΔV = p mu V(1) + m V(nu) - V(mu)
//! reveal-l, noise q:  m = mu + (1-q)(1-mu),    nu = mu / m
//!                     ΔV = q (1-mu) V(0) + m V(nu) - V(mu)
//! ```
//!
//! `ΔV` must agree with the generic signal sum
//! [`experiment_value`](crate::model::experiment::experiment_value)` - V(mu)`
//! to 1e-12; the two routes are kept separate so tests can cross-check them.

use crate::error::Error;
use crate::model::belief::Belief;
use crate::model::experiment::{
    experiment_value, ExperimentKind, Orientation, SimpleExperiment,
};
use crate::model::value::ValueFunction;
use serde::{Deserialize, Serialize};

/// An experiment offered at a price.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MenuContract {
    pub experiment: ExperimentKind,
    pub price: f64,
}

impl MenuContract {
    pub fn new(experiment: impl Into<ExperimentKind>, price: f64) -> Result<Self, Error> {
        if !(price.is_finite() && price >= 0.0) {
            return Err(Error::invalid("price", format!("{price} must be >= 0")));
        }
        Ok(MenuContract {
            experiment: experiment.into(),
            price,
        })
    }
}

/// Surplus `ΔV(mu, e) = U(e, mu) - V(mu)` by the branch formula.
pub fn delta_v(mu: Belief, e: SimpleExperiment, v: &ValueFunction) -> f64 {
    let mu = mu.value();
    match e.orientation {
        Orientation::Null => 0.0,
        Orientation::Full => mu * v.value(1.0) + (1.0 - mu) * v.value(0.0) - v.value(mu),
        Orientation::RevealL => {
            let q = e.noise;
            let m = mu + (1.0 - q) * (1.0 - mu);
            let body = if m > 0.0 { m * v.value(mu / m) } else { 0.0 };
            q * (1.0 - mu) * v.value(0.0) + body - v.value(mu)
        }
        Orientation::RevealH => {
            let p = e.noise;
            let m = mu * (1.0 - p) + (1.0 - mu);
            let body = if m > 0.0 {
                m * v.value(mu * (1.0 - p) / m)
            } else {
                0.0
            };
            p * mu * v.value(1.0) + body - v.value(mu)
        }
    }
}

/// Analytic partial derivative of `ΔV` in the buyer's belief, holding the
/// experiment fixed.
///
/// With `nu` the noisy-signal posterior at `mu`:
///
/// ```text
/// reveal-l:  q (V(nu) - V(0)) + V'(nu) (1-q)/m - V'(mu)
/// reveal-h:  p (V(1) - V(nu)) + V'(nu) (1-p)/m - V'(mu)
/// ```
///
/// Requires a smooth value function; kinked table values have no classical
/// derivative.
pub fn delta_v_mu(mu: Belief, e: SimpleExperiment, v: &ValueFunction) -> Result<f64, Error> {
    if !v.is_smooth() {
        return Err(Error::UnsupportedValueKind {
            operation: "delta_v_mu",
        });
    }
    let mu = mu.value();
    Ok(match e.orientation {
        Orientation::Null => 0.0,
        Orientation::Full => v.value(1.0) - v.value(0.0) - v.deriv(mu)?,
        Orientation::RevealL => {
            let q = e.noise;
            let m = mu + (1.0 - q) * (1.0 - mu);
            if m <= 0.0 {
                // q = 1 and mu = 0: degenerate full-revelation corner
                v.value(1.0) - v.value(0.0) - v.deriv(mu)?
            } else {
                let nu = mu / m;
                q * (v.value(nu) - v.value(0.0)) + v.deriv(nu)? * (1.0 - q) / m - v.deriv(mu)?
            }
        }
        Orientation::RevealH => {
            let p = e.noise;
            let m = mu * (1.0 - p) + (1.0 - mu);
            if m <= 0.0 {
                v.value(1.0) - v.value(0.0) - v.deriv(mu)?
            } else {
                let nu = mu * (1.0 - p) / m;
                p * (v.value(1.0) - v.value(nu)) + v.deriv(nu)? * (1.0 - p) / m - v.deriv(mu)?
            }
        }
    })
}

/// Analytic partial derivative of `ΔV` in the experiment's noise parameter,
/// holding the buyer's belief fixed.
///
/// ```text
/// reveal-l:  -(1-mu) (V(nu) - V(0) - nu V'(nu))
/// reveal-h:   mu     (V(1) - V(nu) - (1-nu) V'(nu))
/// ```
///
/// This is the other leg of the local incentive constraint
/// `p'(mu) = ∂ΔV/∂noise * noise'(mu)` along a contract curve.
pub fn delta_v_noise(mu: Belief, e: SimpleExperiment, v: &ValueFunction) -> Result<f64, Error> {
    if !v.is_smooth() {
        return Err(Error::UnsupportedValueKind {
            operation: "delta_v_noise",
        });
    }
    let mu = mu.value();
    Ok(match e.orientation {
        Orientation::Null | Orientation::Full => 0.0,
        Orientation::RevealL => {
            let m = mu + (1.0 - e.noise) * (1.0 - mu);
            if m <= 0.0 {
                0.0
            } else {
                let nu = mu / m;
                -(1.0 - mu) * (v.value(nu) - v.value(0.0) - nu * v.deriv(nu)?)
            }
        }
        Orientation::RevealH => {
            let m = mu * (1.0 - e.noise) + (1.0 - mu);
            if m <= 0.0 {
                0.0
            } else {
                let nu = mu * (1.0 - e.noise) / m;
                mu * (v.value(1.0) - v.value(nu) - (1.0 - nu) * v.deriv(nu)?)
            }
        }
    })
}

/// What the buyer picks when facing a finite menu.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContractChoice {
    /// Index into the offered menu.
    Contract(usize),
    /// Keep the outside option `V(mu)`.
    OutsideOption,
}

/// The buyer's optimal choice from a finite menu, against the outside option.
///
/// Ties (within 1e-12) go to the cheaper contract, then the lower index; a
/// contract that matches the outside option is taken.
pub fn buyer_best_contract(
    menu: &[MenuContract],
    mu: Belief,
    v: &ValueFunction,
) -> ContractChoice {
    const TIE: f64 = 1e-12;
    let outside = v.value(mu.value());
    let mut best: Option<(usize, f64)> = None;
    for (i, c) in menu.iter().enumerate() {
        let net = experiment_value(&c.experiment, mu, v) - c.price;
        let better = match best {
            None => true,
            Some((bi, bnet)) => {
                net > bnet + TIE
                    || (net >= bnet - TIE
                        && (c.price < menu[bi].price - TIE
                            || (c.price <= menu[bi].price + TIE && i < bi)))
            }
        };
        if better {
            best = Some((i, net));
        }
    }
    match best {
        Some((i, net)) if net >= outside - TIE => ContractChoice::Contract(i),
        _ => ContractChoice::OutsideOption,
    }
}

/// Result of reducing a joint type table to private beliefs.
#[derive(Debug, Clone, PartialEq)]
pub struct BeliefOfTypeResult {
    /// `(buyer type index, Prob(t_S = h | t_B))` for types with positive mass.
    pub beliefs: Vec<(usize, Belief)>,
    /// Buyer types with zero marginal probability, excluded from the output.
    pub excluded: Vec<usize>,
}

/// Reduce a joint signal model to each buyer type's belief about the seller's
/// binary signal.
///
/// `joint[x][s][b]` is `pi(t_S = s, t_B = b | x)` (seller signal index 0 = h,
/// 1 = l), and `prior_x` is the state prior. The belief
/// `Prob(t_S = h | t_B = b)` is a sufficient statistic for the buyer type.
pub fn belief_of_type(
    joint: &[[Vec<f64>; 2]],
    prior_x: &[f64],
) -> Result<BeliefOfTypeResult, Error> {
    if joint.len() != prior_x.len() || joint.is_empty() {
        return Err(Error::invalid(
            "joint table",
            "need one conditional table per state",
        ));
    }
    let n_b = joint[0][0].len();
    for table in joint {
        let total: f64 = table.iter().flat_map(|row| row.iter()).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(
                "joint table",
                format!("conditional table mass {total} != 1"),
            ));
        }
        if table.iter().any(|row| row.len() != n_b) {
            return Err(Error::invalid("joint table", "ragged buyer dimension"));
        }
    }
    if (prior_x.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(Error::invalid("state prior", "must sum to 1"));
    }

    let mut beliefs = Vec::new();
    let mut excluded = Vec::new();
    for b in 0..n_b {
        let mut joint_h = 0.0;
        let mut mass = 0.0;
        for (x, table) in joint.iter().enumerate() {
            joint_h += prior_x[x] * table[0][b];
            mass += prior_x[x] * (table[0][b] + table[1][b]);
        }
        if mass <= 0.0 {
            excluded.push(b);
        } else {
            beliefs.push((b, Belief::clamped(joint_h / mass)));
        }
    }
    Ok(BeliefOfTypeResult { beliefs, excluded })
}
